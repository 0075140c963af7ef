#include "steinlab/decompose.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "steinlab/errors.hpp"

namespace steinlab {

namespace {

// Groups ascending eigenvalues into clusters separated by more than gap.
std::vector<std::pair<int, int>> clusters(const RVec& ev, double gap) {
  std::vector<std::pair<int, int>> out;
  int start = 0;
  for (int i = 1; i <= ev.size(); ++i)
    if (i == ev.size() || ev(i) - ev(i - 1) > gap) {
      out.push_back({start, i - start});
      start = i;
    }
  return out;
}

Vec random_hermitian(const FDAlgebra& a, const Mat& span, Rng& rng) {
  Vec c = Vec::Zero(a.dim);
  for (Eigen::Index k = 0; k < span.cols(); ++k) c += rng.complex_normal() * span.col(k);
  return c + star(a, c);
}

}  // namespace

Mat center_basis(const FDAlgebra& a) {
  const int n = a.dim;
  Mat stacked(static_cast<Eigen::Index>(n) * n, n);
  for (int i = 0; i < n; ++i) stacked.middleRows(static_cast<Eigen::Index>(i) * n, n) = a.left_basis(i) - a.right_basis(i);
  return nullspace(stacked).basis;
}

std::vector<SimpleBlock> wedderburn(const FDAlgebra& a, std::uint64_t seed) {
  const GNSSpace gns = GNSSpace::of(std::make_shared<const FDAlgebra>(a));
  const Mat upper = gns.chol.adjoint();
  auto to_white = [&](const Mat& op) -> Mat {
    // L^H op L^{-H}
    Mat t = upper * op;
    return upper.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(t);
  };
  const Mat zbasis = center_basis(a);
  const int ncenter = static_cast<int>(zbasis.cols());
  const Vec unit_w = gns.whiten(a.unit);
  Rng rng(seed);

  for (int attempt = 0; attempt < 25; ++attempt) {
    const Vec z = random_hermitian(a, zbasis, rng);
    Mat wz = to_white(a.left_mult(z));
    wz = (wz + wz.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Mat> es(wz);
    const RVec& ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    const auto cl = clusters(ev, 1e-6 * scale);
    if (static_cast<int>(cl.size()) != ncenter) continue;

    std::vector<SimpleBlock> blocks;
    bool retry = false;
    for (const auto& [start, size] : cl) {
      const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(size))));
      if (n * n != size) {
        std::ostringstream os;
        os << "central block of dimension " << size << " is not a perfect square";
        throw NotSemisimple(os.str());
      }
      const Mat q = es.eigenvectors().middleCols(start, size);
      SimpleBlock b;
      b.n = n;
      b.central_projection = gns.unwhiten(q * (q.adjoint() * unit_w));
      b.alpha = trace(a, b.central_projection).real();

      // split the block with a random Hermitian element compressed to it
      bool split = false;
      for (int inner = 0; inner < 25 && !split; ++inner) {
        const Vec h = random_hermitian(a, Mat::Identity(a.dim, a.dim), rng);
        Mat wh = q.adjoint() * to_white(a.left_mult(h)) * q;
        wh = (wh + wh.adjoint()) * 0.5;
        Eigen::SelfAdjointEigenSolver<Mat> hs(wh);
        const double hscale = std::max(1.0, hs.eigenvalues().cwiseAbs().maxCoeff());
        const auto hc = clusters(hs.eigenvalues(), 1e-6 * hscale);
        if (static_cast<int>(hc.size()) != n) continue;
        bool even = true;
        for (const auto& c : hc) even = even && c.second == n;
        if (!even) continue;
        const Vec zw = gns.whiten(b.central_projection);
        for (const auto& [s, m] : hc) {
          const Mat v = q * hs.eigenvectors().middleCols(s, m);
          b.minimal_projections.push_back(gns.unwhiten(v * (v.adjoint() * zw)));
        }
        split = true;
      }
      if (!split) {
        retry = true;
        break;
      }
      blocks.push_back(std::move(b));
    }
    if (retry) continue;
    std::stable_sort(blocks.begin(), blocks.end(), [](const SimpleBlock& x, const SimpleBlock& y) {
      if (x.n != y.n) return x.n > y.n;
      return x.alpha > y.alpha + 1e-12;
    });
    return blocks;
  }
  throw RankAmbiguous("could not split the algebra into simple blocks; eigenvalues keep colliding");
}

std::vector<Block> multimatrix_decompose(const FDAlgebra& a, std::uint64_t seed) {
  std::vector<Block> out;
  for (const auto& b : wedderburn(a, seed)) out.push_back({b.n, b.alpha});
  return out;
}

MatrixUnits matrix_units(const FDAlgebra& a, std::uint64_t seed) {
  const auto blocks = wedderburn(a, seed);
  Rng rng(seed ^ 0x5bd1e995ULL);
  MatrixUnits out;
  for (const auto& b : blocks) {
    const int n = b.n;
    std::vector<Vec> row(static_cast<std::size_t>(n));  // e_{1k}
    row[0] = b.minimal_projections[0];
    const double t1 = trace(a, row[0]).real();
    for (int k = 1; k < n; ++k) {
      Vec v;
      double c = 0.0;
      for (int attempt = 0; attempt < 10 && c < 1e-6; ++attempt) {
        Vec x(a.dim);
        for (int i = 0; i < a.dim; ++i) x(i) = rng.complex_normal();
        v = multiply(a, multiply(a, b.minimal_projections[0], x), b.minimal_projections[k]);
        c = trace(a, multiply(a, v, star(a, v))).real() / t1;
      }
      if (c < 1e-6) throw NotSemisimple("could not connect minimal projections inside a block");
      row[k] = v / std::sqrt(c);
    }
    std::vector<Vec> units(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) units[j * n + k] = multiply(a, star(a, row[j]), row[k]);
    out.push_back(std::move(units));
  }
  return out;
}

MatrixUnits standard_matrix_units(const std::vector<Block>& blocks) {
  const int dim = block_offset(blocks, static_cast<int>(blocks.size()));
  MatrixUnits out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const int n = blocks[i].n, off = block_offset(blocks, static_cast<int>(i));
    std::vector<Vec> units;
    for (int j = 0; j < n * n; ++j) {
      Vec v = Vec::Zero(dim);
      v(off + j) = 1.0;
      units.push_back(v);
    }
    out.push_back(std::move(units));
  }
  return out;
}

double matrix_unit_residual(const FDAlgebra& a, const MatrixUnits& units) {
  double r = 0.0;
  Vec total = Vec::Zero(a.dim);
  for (std::size_t bi = 0; bi < units.size(); ++bi) {
    const auto& u = units[bi];
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(u.size()))));
    if (n * n != static_cast<int>(u.size())) throw UnitsInvalid("block family size is not a square");
    for (int j = 0; j < n; ++j) {
      total += u[j * n + j];
      for (int k = 0; k < n; ++k) {
        r = std::max(r, max_abs(Vec(star(a, u[j * n + k]) - u[k * n + j])));
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) {
            const Vec p = multiply(a, u[j * n + k], u[l * n + m]);
            r = std::max(r, k == l ? max_abs(Vec(p - u[j * n + m])) : max_abs(p));
          }
      }
    }
    // different blocks annihilate each other
    for (std::size_t bj = 0; bj < units.size(); ++bj)
      if (bj != bi) r = std::max(r, max_abs(multiply(a, u[0], units[bj][0])));
  }
  return std::max(r, max_abs(Vec(total - a.unit)));
}

}  // namespace steinlab
