#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "steinlab/corpus.hpp"
#include "steinlab/derivations.hpp"
#include "steinlab/errors.hpp"
#include "steinlab/io.hpp"
#include "steinlab/report_format.hpp"
#include "steinlab/vndim.hpp"

namespace {

struct ReportFlags {
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  std::string format = "md";
  std::string out;
  bool timings = false;
};

void add_report_flags(CLI::App* cmd, ReportFlags& f) {
  cmd->add_option("--tolerance", f.tolerance, "pass/fail tolerance (overrides spec and STEINLAB_TOL)");
  cmd->add_option("--seed", f.seed, "random seed (overrides spec)");
  cmd->add_option("--format", f.format, "json, csv or md")->check(CLI::IsMember({"json", "csv", "md", "markdown"}));
  cmd->add_option("--out", f.out, "write the report here instead of stdout");
  cmd->add_flag("--timings", f.timings, "include per-check wall time (breaks byte-identical output)");
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw steinlab::SpecInvalid("--out: cannot open '" + path + "'");
  os << text;
}

int report(const std::vector<steinlab::VerificationReport>& reports, const ReportFlags& f) {
  steinlab::FormatOptions opt;
  opt.timings = f.timings;
  emit(steinlab::format_reports(reports, steinlab::parse_format(f.format), opt), f.out);
  for (const auto& r : reports)
    if (!r.all_pass()) return 1;
  return 0;
}

int dim_command(const std::string& path, std::uint64_t seed) {
  using namespace steinlab;
  const LoadedAlgebra la = load_algebra(path);
  const ValidationReport v = validate(*la.algebra);
  if (!v.pass) {
    std::cerr << "steinlab: algebra fails validation:";
    for (const auto& f : v.failures) std::cerr << " " << f;
    std::cerr << "\n";
    return 1;
  }
  SolveOptions so;
  so.seed = seed;
  const DerivationSpace space = derivation_space(la.algebra, so);
  VnOptions vo;
  vo.seed = seed;
  const VnResult r = vn_dimension(phi_x(space, hermitian_generators(*la.algebra, seed)), vo);
  std::printf("dim Der(%s) = %.12g", la.algebra->label.c_str(), r.value);
  if (r.rational.exact) std::printf(" = %s", r.rational.str().c_str());
  std::printf("\nlinear dimension %d\n", space.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivation spaces, von Neumann dimensions and crossed products of finite-dimensional tracial *-algebras"};
  app.require_subcommand(1);

  ReportFlags run_flags, corpus_flags;
  std::string spec_path, algebra_path;
  std::uint64_t dim_seed = 1;

  CLI::App* run = app.add_subcommand("run", "run the checks listed in a JSON experiment spec");
  run->add_option("spec", spec_path, "experiment spec (JSON)")->required();
  add_report_flags(run, run_flags);

  CLI::App* corpus = app.add_subcommand("corpus", "run the built-in battery");
  add_report_flags(corpus, corpus_flags);

  CLI::App* dim = app.add_subcommand("dim", "print the von Neumann dimension of Der(A)");
  dim->add_option("algebra", algebra_path, "algebra (JSON)")->required();
  dim->add_option("--seed", dim_seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const steinlab::ExperimentSpec spec = steinlab::load_spec(spec_path);
      return report({steinlab::run(spec, run_flags.tolerance, run_flags.seed)}, run_flags);
    }
    if (*corpus) return report(steinlab::run_corpus(corpus_flags.tolerance, corpus_flags.seed), corpus_flags);
    if (*dim) return dim_command(algebra_path, dim_seed);
  } catch (const steinlab::Error& e) {
    std::cerr << "steinlab: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
