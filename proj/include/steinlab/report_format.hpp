#pragma once

#include <string>
#include <vector>

#include "steinlab/checks.hpp"

namespace steinlab {

enum class ReportFormat { json, csv, markdown };

// Throws SpecInvalid for unknown names; accepts json, csv, md, markdown.
ReportFormat parse_format(const std::string& name);

struct FormatOptions {
  bool timings = false;  // elapsed times break byte-identical output, so they are opt-in
};

std::string format_reports(const std::vector<VerificationReport>& reports, ReportFormat fmt,
                           const FormatOptions& opt = {});

}  // namespace steinlab
