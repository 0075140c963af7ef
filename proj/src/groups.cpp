#include <algorithm>
#include <array>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

#include "steinlab/constructions.hpp"
#include "steinlab/errors.hpp"

namespace steinlab {

bool FiniteGroup::is_abelian() const {
  for (int g = 0; g < order; ++g)
    for (int h = g + 1; h < order; ++h)
      if (table[g][h] != table[h][g]) return false;
  return true;
}

FiniteGroup make_group(std::vector<std::vector<int>> table, std::string label) {
  const int n = static_cast<int>(table.size());
  if (n < 1) throw InvalidGroup("empty multiplication table");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n) throw InvalidGroup("table is not square");
    for (int v : row)
      if (v < 0 || v >= n) throw InvalidGroup("table entry out of range");
  }
  FiniteGroup g;
  g.order = n;
  g.table = std::move(table);
  g.label = std::move(label);

  int e = -1;
  for (int c = 0; c < n && e < 0; ++c) {
    bool ok = true;
    for (int x = 0; x < n && ok; ++x) ok = g.table[c][x] == x && g.table[x][c] == x;
    if (ok) e = c;
  }
  if (e < 0) throw InvalidGroup("no identity element");
  g.identity = e;

  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (g.table[g.table[a][b]][c] != g.table[a][g.table[b][c]]) {
          std::ostringstream os;
          os << "associativity fails at (" << a << "," << b << "," << c << ")";
          throw InvalidGroup(os.str());
        }

  g.inverse.assign(static_cast<std::size_t>(n), -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b)
      if (g.table[a][b] == e && g.table[b][a] == e) {
        g.inverse[a] = b;
        break;
      }
    if (g.inverse[a] < 0) throw InvalidGroup("element " + std::to_string(a) + " has no inverse");
  }
  return g;
}

FiniteGroup cyclic_group(int n) {
  if (n < 1) throw InvalidGroup("cyclic group order must be positive");
  std::vector<std::vector<int>> t(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  FiniteGroup g = make_group(std::move(t), "Z/" + std::to_string(n));
  if (n % 2 == 0) {
    g.parity.resize(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) g.parity[a] = a % 2;
  }
  return g;
}

FiniteGroup product_group(const FiniteGroup& a, const FiniteGroup& b) {
  const int n = a.order * b.order;
  std::vector<std::vector<int>> t(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      t[x][y] = a.mul(x / b.order, y / b.order) * b.order + b.mul(x % b.order, y % b.order);
  FiniteGroup g = make_group(std::move(t), a.label + "x" + b.label);
  if (!a.parity.empty() || !b.parity.empty()) {
    g.parity.resize(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) g.parity[x] = a.parity.empty() ? b.parity[x % b.order] : a.parity[x / b.order];
  }
  return g;
}

FiniteGroup symmetric3() {
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  auto index = [&](const std::array<int, 3>& q) {
    return static_cast<int>(std::find(perms.begin(), perms.end(), q) - perms.begin());
  };
  std::vector<std::vector<int>> t(6, std::vector<int>(6));
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int x = 0; x < 3; ++x) c[x] = perms[a][perms[b][x]];  // (ab)(x) = a(b(x))
      t[a][b] = index(c);
    }
  FiniteGroup g = make_group(std::move(t), "S_3");
  g.parity.resize(6);
  for (int a = 0; a < 6; ++a) {
    int inversions = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) inversions += perms[a][i] > perms[a][j];
    g.parity[a] = inversions % 2;
  }
  return g;
}

FiniteGroup dihedral4() {
  // r^k s^m stored at k + 4m; s r s = r^{-1}
  std::vector<std::vector<int>> t(8, std::vector<int>(8));
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      const int a = x % 4, b = x / 4, c = y % 4, d = y / 4;
      const int k = ((a + (b ? -c : c)) % 4 + 4) % 4;
      t[x][y] = k + 4 * ((b + d) % 2);
    }
  FiniteGroup g = make_group(std::move(t), "D_4");
  g.parity.resize(8);
  for (int x = 0; x < 8; ++x) g.parity[x] = x / 4;
  return g;
}

FiniteGroup named_group(const std::string& name) {
  static const std::regex cyc(R"(Z/(\d+))");
  static const std::regex prod(R"(Z/(\d+)xZ/(\d+))");
  std::smatch m;
  if (std::regex_match(name, m, prod)) return product_group(cyclic_group(std::stoi(m[1])), cyclic_group(std::stoi(m[2])));
  if (std::regex_match(name, m, cyc)) return cyclic_group(std::stoi(m[1]));
  if (name == "S_3" || name == "S3") return symmetric3();
  if (name == "D_4" || name == "D4") return dihedral4();
  if (name == "trivial" || name == "1") return cyclic_group(1);
  throw SpecInvalid("unknown group name '" + name + "'");
}

Subgroup make_subgroup(const FiniteGroup& parent, std::vector<int> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  for (int x : elements)
    if (x < 0 || x >= parent.order) throw NotSubgroup("element " + std::to_string(x) + " is not in the group");
  // keep the identity first so the relabelled group has identity 0
  auto it = std::find(elements.begin(), elements.end(), parent.identity);
  if (it == elements.end()) throw NotSubgroup("subset does not contain the identity");
  std::rotate(elements.begin(), it, it + 1);

  const int k = static_cast<int>(elements.size());
  auto local = [&](int x) {
    auto p = std::find(elements.begin(), elements.end(), x);
    return p == elements.end() ? -1 : static_cast<int>(p - elements.begin());
  };
  std::vector<std::vector<int>> t(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k)));
  for (int a = 0; a < k; ++a) {
    if (local(parent.inv(elements[a])) < 0) throw NotSubgroup("subset is not closed under inverses");
    for (int b = 0; b < k; ++b) {
      const int c = local(parent.mul(elements[a], elements[b]));
      if (c < 0) throw NotSubgroup("subset is not closed under the group law");
      t[a][b] = c;
    }
  }
  Subgroup s;
  s.group = make_group(std::move(t), parent.label + "_sub" + std::to_string(k));
  if (!parent.parity.empty()) {
    s.group.parity.resize(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) s.group.parity[a] = parent.parity[elements[a]];
  }
  s.elements = std::move(elements);
  return s;
}

}  // namespace steinlab
