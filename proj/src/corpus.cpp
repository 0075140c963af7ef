#include "steinlab/corpus.hpp"

#include <cmath>

namespace steinlab {

namespace {

AlgebraPtr share(FDAlgebra a) { return std::make_shared<const FDAlgebra>(std::move(a)); }

ExperimentSpec with_blocks(std::string label, std::vector<Block> blocks, const std::string& name) {
  ExperimentSpec s;
  s.label = std::move(label);
  FDAlgebra a = multimatrix(blocks);
  a.label = name;
  s.algebra = share(std::move(a));
  s.blocks = std::move(blocks);
  return s;
}

ExperimentSpec with_group_algebra(std::string label, const FiniteGroup& g) {
  ExperimentSpec s;
  s.label = std::move(label);
  FDAlgebra a = group_algebra(g);
  a.label = "C[" + g.label + "]";
  s.algebra = share(std::move(a));
  s.algebra_group = g;
  return s;
}

void act(ExperimentSpec& s, const FiniteGroup& g, GroupAction a) {
  s.group = g;
  s.action = std::move(a);
}

}  // namespace

std::vector<ExperimentSpec> builtin_corpus() {
  std::vector<ExperimentSpec> out;
  const std::vector<Block> c1{{1, 1.0}}, c2{{1, 0.5}, {1, 0.5}}, m2{{2, 1.0}};

  for (int n = 2; n <= 6; ++n) {
    const FiniteGroup g = cyclic_group(n);
    ExperimentSpec s = with_blocks("C | Z/" + std::to_string(n) + " trivial", c1, "C");
    act(s, g, trivial_action(s.algebra, g));
    out.push_back(std::move(s));
  }
  {
    const FiniteGroup g = cyclic_group(2);
    ExperimentSpec s = with_blocks("C^2 | Z/2 flip", c2, "C^2");
    act(s, g, flip_action(s.algebra, c2, g));
    out.push_back(std::move(s));
  }
  {
    const FiniteGroup g = cyclic_group(2);
    ExperimentSpec s = with_blocks("M_2 | Z/2 Ad diag(1,-1)", m2, "M_2");
    Vec u = Vec::Zero(4);
    u(0) = 1.0;
    u(3) = -1.0;
    act(s, g, ad_action(s.algebra, g, u));
    out.push_back(std::move(s));
  }
  {
    const FiniteGroup g = cyclic_group(2);
    ExperimentSpec s = with_group_algebra("C[Z/2] | Z/2 trivial", g);
    act(s, g, trivial_action(s.algebra, g));
    out.push_back(std::move(s));
  }
  {
    const FiniteGroup g = cyclic_group(2);
    const std::vector<Block> b{{1, 0.5}, {1, 0.3}, {1, 0.2}};
    ExperimentSpec s = with_blocks("C^3 uneven | Z/2 trivial", b, "C^3(1/2,3/10,1/5)");
    act(s, g, trivial_action(s.algebra, g));
    out.push_back(std::move(s));
  }
  {
    const FiniteGroup g = cyclic_group(2);
    const std::vector<Block> b{{2, 2.0 / 3.0}, {1, 1.0 / 3.0}};
    ExperimentSpec s = with_blocks("M_2+C | Z/2 trivial", b, "M_2+C(2/3,1/3)");
    act(s, g, trivial_action(s.algebra, g));
    out.push_back(std::move(s));
  }
  {
    const FiniteGroup g = cyclic_group(3);
    const std::vector<Block> b{{1, 1.0 / 3.0}, {1, 1.0 / 3.0}, {1, 1.0 / 3.0}};
    ExperimentSpec s = with_blocks("C^3 | Z/3 regular", b, "C^3");
    act(s, g, regular_block_action(s.algebra, b, g));
    out.push_back(std::move(s));
  }
  for (int n : {2, 3}) {
    const FiniteGroup g = cyclic_group(n);
    ExperimentSpec s = with_group_algebra("C[Z/" + std::to_string(n) + "] | Z/" + std::to_string(n) + " Fourier", g);
    act(s, g, fourier_action(s.algebra, g));
    out.push_back(std::move(s));
  }
  {
    const FiniteGroup g = symmetric3();
    ExperimentSpec s = with_blocks("C | S_3 trivial", c1, "C");
    act(s, g, trivial_action(s.algebra, g));
    out.push_back(std::move(s));
  }
  {
    const FiniteGroup g = symmetric3();
    ExperimentSpec s = with_blocks("C^2 | S_3 sign flip", c2, "C^2");
    act(s, g, flip_action(s.algebra, c2, g));
    out.push_back(std::move(s));
  }
  {
    const FiniteGroup g = dihedral4();
    ExperimentSpec s = with_blocks("C | D_4 trivial", c1, "C");
    act(s, g, trivial_action(s.algebra, g));
    out.push_back(std::move(s));
  }
  {
    const FiniteGroup g = cyclic_group(4);
    ExperimentSpec s = with_blocks("C^2 | Z/4 flip, H = {0,2}", c2, "C^2");
    act(s, g, flip_action(s.algebra, c2, g));
    s.subgroup = std::vector<int>{0, 2};
    out.push_back(std::move(s));
  }
  {
    const FiniteGroup g = product_group(cyclic_group(2), cyclic_group(2));
    ExperimentSpec s = with_blocks("C^2 | Z/2xZ/2 flip, H = {0,2}", c2, "C^2");
    act(s, g, flip_action(s.algebra, c2, g));
    s.subgroup = std::vector<int>{0, 2};
    out.push_back(std::move(s));
  }
  out.push_back(with_blocks("M_2", m2, "M_2"));
  out.push_back(with_group_algebra("C[Z/2xZ/2]", product_group(cyclic_group(2), cyclic_group(2))));
  out.push_back(with_group_algebra("C[S_3]", symmetric3()));
  return out;
}

std::vector<VerificationReport> run_corpus(std::optional<double> tol, std::optional<std::uint64_t> seed) {
  std::vector<VerificationReport> out;
  for (const auto& spec : builtin_corpus()) out.push_back(run(spec, tol, seed));
  return out;
}

}  // namespace steinlab
