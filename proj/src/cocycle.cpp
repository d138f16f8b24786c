#include "fellstab/cocycle.hpp"

#include <cctype>
#include <charconv>
#include <numeric>

#include "fellstab/error.hpp"

namespace fellstab {

namespace {

bool parse_int(std::string_view s, std::int64_t& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view t = trim(text);
  std::int64_t p = 0, q = 1;
  const auto slash = t.find('/');
  const bool ok = slash == std::string_view::npos
                      ? parse_int(t, p)
                      : parse_int(trim(t.substr(0, slash)), p) && parse_int(trim(t.substr(slash + 1)), q) && q != 0;
  if (!ok) throw Error(ErrorKind::IrrationalPhase, "phase '" + std::string(text) + "' is not an exact rational p/q");
  return Rational(p, q);
}

std::string format_rational(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational mod_one(const Rational& r) {
  std::int64_t n = r.numerator(), d = r.denominator();
  n %= d;
  if (n < 0) n += d;
  return Rational(n, d);
}

RationalCocycle make_cocycle(RatMat theta) {
  const int m = static_cast<int>(theta.size());
  for (auto& row : theta) {
    if (static_cast<int>(row.size()) != m) throw Error(ErrorKind::InvalidInput, "cocycle exponent matrix is not square");
    for (auto& x : row) x = mod_one(x);
  }
  return {m, std::move(theta)};
}

bool Bicharacter::operator<(const Bicharacter& o) const {
  if (m != o.m) return m < o.m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (omega[i][j] != o.omega[i][j]) return omega[i][j] < o.omega[i][j];
  return false;
}

std::int64_t Bicharacter::denominator() const {
  std::int64_t n = 1;
  for (const auto& row : omega)
    for (const auto& x : row) n = std::lcm(n, x.denominator());
  return n;
}

bool Bicharacter::trivial() const {
  for (const auto& row : omega)
    for (const auto& x : row)
      if (x.numerator() != 0) return false;
  return true;
}

Bicharacter bicharacter(const RationalCocycle& c) {
  Bicharacter b{c.m, RatMat(c.m, std::vector<Rational>(c.m))};
  for (int i = 0; i < c.m; ++i)
    for (int j = 0; j < c.m; ++j) b.omega[i][j] = mod_one(c.theta[i][j] - c.theta[j][i]);
  return b;
}

RationalCocycle restrict_cocycle(const RationalCocycle& c, const Subgroup& h) {
  if (h.k != c.m) throw Error(ErrorKind::InvalidInput, "subgroup ambient rank differs from cocycle rank");
  const auto r = static_cast<int>(h.basis.cols());
  RatMat t(r, std::vector<Rational>(r));
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      Rational s = 0;
      for (int i = 0; i < c.m; ++i)
        for (int j = 0; j < c.m; ++j)
          if (h.basis(i, a) != 0 && h.basis(j, b) != 0) s += c.theta[i][j] * (h.basis(i, a) * h.basis(j, b));
      t[a][b] = s;
    }
  return make_cocycle(std::move(t));
}

bool in_symmetrizer(const Bicharacter& omega, const IntVec& y) {
  for (int b = 0; b < omega.m; ++b) {
    Rational s = 0;
    for (int a = 0; a < omega.m; ++a) s += omega.omega[a][b] * y[a];
    if (mod_one(s).numerator() != 0) return false;
  }
  return true;
}

Symmetrizer symmetrizer(const Bicharacter& omega, const Subgroup& h) {
  const int r = static_cast<int>(h.basis.cols());
  if (omega.m != r) throw Error(ErrorKind::InvalidInput, "bicharacter size differs from the subgroup rank");
  if (h.rank() != r) throw Error(ErrorKind::InvalidInput, "symmetrizer needs an independent subgroup basis");

  // omega(y, b) = 0 mod 1 for all b  <=>  W y = 0 mod N with W = N omega^T.
  const std::int64_t n = omega.denominator();
  IntMat w(r, r);
  for (int b = 0; b < r; ++b)
    for (int a = 0; a < r; ++a) {
      const Rational x = omega.omega[a][b] * n;
      w(b, a) = x.numerator();
    }

  Symmetrizer out;
  if (r == 0) {
    out.subgroup = h;
    out.h_coords = IntMat(0, 0);
    return out;
  }
  // U W V = D; y = V z, and d_i z_i = 0 mod N  <=>  z_i in (N / gcd(N, d_i)) Z.
  const SmithForm s = smith_normal_form(w);
  IntMat scale = IntMat::Zero(r, r);
  for (int i = 0; i < r; ++i) {
    scale(i, i) = n / std::gcd(n, s.D(i, i));
    out.index *= scale(i, i);
  }
  out.h_coords = s.V * scale;
  out.subgroup = {h.k, h.basis * out.h_coords};
  // Z(omega) is a full-rank subgroup of a free group, so it is free.
  out.dual = dual_shape(IntMat(r, 0), r);
  return out;
}

}  // namespace fellstab
