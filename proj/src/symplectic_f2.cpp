#include "w160/symplectic_f2.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <stdexcept>

namespace w160::f2 {

int weil_pairing(TwoTorsion u, TwoTorsion v) {
  return (std::popcount(static_cast<unsigned>((u & 31) & (v >> 5))) ^
          std::popcount(static_cast<unsigned>((u >> 5) & (v & 31)))) & 1;
}

int q0(TwoTorsion c) { return std::popcount(static_cast<unsigned>((c & 31) & (c >> 5))) & 1; }

std::vector<Family> families() {
  std::vector<Family> out;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) out.emplace_back(i, j);
  return out;
}

std::array<TwoTorsion, 4> v_ij_basis(int i, int j) {
  const int d = ((j - i) % 5 + 5) % 5;
  switch (d) {
    case 1:
      return {alpha(i), alpha(i - 1), alpha(i + 1), alpha(i + 2)};
    case 2:
      return {alpha(i), static_cast<TwoTorsion>(alpha(i - 1) ^ alpha(i + 1)), alpha(i + 2),
              static_cast<TwoTorsion>(alpha(i + 1) ^ alpha(i + 3))};
    case 3:
    case 4:
      return v_ij_basis(j, i);
    default:
      throw std::invalid_argument("v_ij needs i != j mod 5");
  }
}

std::vector<TwoTorsion> v_ij(int i, int j) {
  std::vector<TwoTorsion> span = {0};
  for (TwoTorsion g : v_ij_basis(i, j)) {
    const std::size_t n = span.size();
    for (std::size_t k = 0; k < n; ++k) span.push_back(static_cast<TwoTorsion>(span[k] ^ g));
  }
  std::sort(span.begin(), span.end());
  span.erase(std::unique(span.begin(), span.end()), span.end());
  return span;
}

TwoTorsion eta_ij(int i, int j) {
  const auto basis = v_ij_basis(i, j);
  TwoTorsion found = 0;
  for (TwoTorsion m = 1; m < 32; ++m) {
    const TwoTorsion c = static_cast<TwoTorsion>(m << 5);
    if (std::all_of(basis.begin(), basis.end(), [&](TwoTorsion b) { return weil_pairing(b, c) == 0; })) {
      if (found) throw std::logic_error("V_ij^perp meets span(alpha') in more than one point");
      found = c;
    }
  }
  return found;
}

std::vector<TwoTorsion> odd_coset(int i, int j) {
  const auto v = v_ij(i, j);
  std::vector<TwoTorsion> out;
  for (unsigned c = 0; c < 1024; ++c) {
    if (std::all_of(v.begin(), v.end(), [&](TwoTorsion x) { return q0(static_cast<TwoTorsion>(c ^ x)) == 1; }))
      out.push_back(static_cast<TwoTorsion>(c));
  }
  return out;
}

std::map<TwoTorsion, int> predict_difference_multiset(Family f1, Family f2) {
  const auto o1 = odd_coset(f1.first, f1.second);
  const auto o2 = odd_coset(f2.first, f2.second);
  std::map<TwoTorsion, int> out;
  if (f1 == f2) {
    for (std::size_t x = 0; x < o1.size(); ++x)
      for (std::size_t y = x + 1; y < o1.size(); ++y) ++out[static_cast<TwoTorsion>(o1[x] ^ o1[y])];
  } else {
    for (TwoTorsion x : o1)
      for (TwoTorsion y : o2) ++out[static_cast<TwoTorsion>(x ^ y)];
  }
  return out;
}

TwoTorsion rotate(TwoTorsion c, int r) {
  r = ((r % 5) + 5) % 5;
  const unsigned lo = c & 31, hi = c >> 5;
  const auto rot5 = [r](unsigned x) { return ((x << r) | (x >> (5 - r))) & 31; };
  return static_cast<TwoTorsion>(rot5(lo) | (rot5(hi) << 5));
}

TwoTorsion AffineFlip::apply(TwoTorsion c) const {
  const unsigned hi = c >> 5;
  unsigned lo = 0;
  for (int r = 0; r < 5; ++r)
    if (std::popcount(rows[r] & hi) & 1) lo |= 1u << r;
  return static_cast<TwoTorsion>(c ^ lo ^ tau);
}

std::vector<AffineFlip> sign_flip_candidates(int k) {
  const auto fams = families();
  std::vector<std::vector<TwoTorsion>> cosets, spaces;
  for (const auto& f : fams) {
    cosets.push_back(odd_coset(f.first, f.second));
    spaces.push_back(v_ij(f.first, f.second));
  }
  std::vector<AffineFlip> out;
  for (unsigned bits = 0; bits < (1u << 15); ++bits) {
    AffineFlip fl;
    int b = 0;
    for (int r = 0; r < 5; ++r)
      for (int c = r; c < 5; ++c, ++b)
        if (bits >> b & 1) {
          fl.rows[r] |= static_cast<std::uint8_t>(1u << c);
          fl.rows[c] |= static_cast<std::uint8_t>(1u << r);
        }
    // tau is fixed by requiring a pointwise fixed coset
    std::size_t fixed = 0;
    while (!(fams[fixed].first == k || fams[fixed].second == k)) ++fixed;
    fl.tau = static_cast<TwoTorsion>(fl.apply(cosets[fixed][0]) ^ cosets[fixed][0]);
    bool ok = true;
    for (std::size_t f = 0; f < fams.size() && ok; ++f) {
      const TwoTorsion c = cosets[f][0];
      const TwoTorsion shift = static_cast<TwoTorsion>(fl.apply(c) ^ c);
      if (fams[f].first == k || fams[f].second == k) {
        ok = shift == 0;
      } else {
        ok = shift != 0 && std::binary_search(spaces[f].begin(), spaces[f].end(), shift);
      }
    }
    if (!ok) continue;
    for (unsigned c = 0; c < 1024 && ok; ++c) ok = q0(fl.apply(static_cast<TwoTorsion>(c))) == q0(static_cast<TwoTorsion>(c));
    if (ok) out.push_back(fl);
  }
  return out;
}

namespace {

bool same_map(const AffineFlip& x, const AffineFlip& y) {
  for (unsigned c = 0; c < 1024; ++c)
    if (x.apply(static_cast<TwoTorsion>(c)) != y.apply(static_cast<TwoTorsion>(c))) return false;
  return true;
}

// rho^k sigma rho^-k as an AffineFlip (conjugation permutes rows and columns).
AffineFlip conjugate(const AffineFlip& s, int k) {
  AffineFlip out;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c)
      if (s.rows[r] >> c & 1) out.rows[(r + k) % 5] |= static_cast<std::uint8_t>(1u << ((c + k) % 5));
  }
  out.tau = rotate(s.tau, k);
  return out;
}

}  // namespace

std::array<AffineFlip, 5> derive_sign_action() {
  std::array<std::vector<AffineFlip>, 5> cands;
  for (int k = 0; k < 5; ++k) cands[k] = sign_flip_candidates(k);
  std::vector<std::array<AffineFlip, 5>> found;
  for (const auto& s0 : cands[0]) {
    std::array<AffineFlip, 5> sig;
    bool ok = true;
    for (int k = 0; k < 5 && ok; ++k) {
      sig[k] = conjugate(s0, k);
      ok = std::any_of(cands[k].begin(), cands[k].end(), [&](const AffineFlip& c) { return same_map(c, sig[k]); });
    }
    for (unsigned c = 0; c < 1024 && ok; ++c) {
      TwoTorsion x = static_cast<TwoTorsion>(c);
      for (int k = 0; k < 5; ++k) x = sig[k].apply(x);
      ok = x == c && sig[0].apply(sig[1].apply(static_cast<TwoTorsion>(c))) ==
                         sig[1].apply(sig[0].apply(static_cast<TwoTorsion>(c)));
    }
    if (ok) found.push_back(sig);
  }
  if (found.size() != 1) throw std::runtime_error("sign action is not uniquely determined");
  return found[0];
}

std::vector<SystemPrediction> predict_systems() {
  const auto fams = families();
  std::map<TwoTorsion, SystemPrediction> sys;
  std::map<TwoTorsion, std::set<std::pair<Family, Family>>> fam_pairs;
  for (std::size_t a = 0; a < fams.size(); ++a) {
    for (std::size_t b = a; b < fams.size(); ++b) {
      for (const auto& [mu, n] : predict_difference_multiset(fams[a], fams[b])) {
        auto& s = sys[mu];
        s.mu = mu;
        s.pairs += n;
        if (a == b) s.within_family += n;
        else fam_pairs[mu].insert({fams[a], fams[b]});
      }
    }
  }
  const auto sig = derive_sign_action();
  std::set<TwoTorsion> seen;
  std::map<TwoTorsion, int> orbit_size;
  for (const auto& [mu, s] : sys) {
    if (seen.count(mu)) continue;
    std::set<TwoTorsion> orb = {mu};
    std::vector<TwoTorsion> frontier = {mu};
    while (!frontier.empty()) {
      const TwoTorsion x = frontier.back();
      frontier.pop_back();
      std::vector<TwoTorsion> imgs = {rotate(x)};
      for (const auto& sk : sig) imgs.push_back(sk.linear(x));
      for (TwoTorsion y : imgs)
        if (orb.insert(y).second) frontier.push_back(y);
    }
    for (TwoTorsion y : orb) {
      seen.insert(y);
      orbit_size[y] = static_cast<int>(orb.size());
    }
  }
  std::vector<SystemPrediction> out;
  for (auto& [mu, s] : sys) {
    s.orbit_size = orbit_size[mu];
    s.family_pairs = static_cast<int>(fam_pairs[mu].size());
    out.push_back(s);
  }
  return out;
}

std::vector<PartitionRow> predict_partition_table() {
  std::map<std::pair<int, int>, PartitionRow> rows;
  for (const auto& s : predict_systems()) {
    auto& r = rows[{s.pairs, s.orbit_size}];
    r.pairs = s.pairs;
    r.orbit_size = s.orbit_size;
    ++r.systems;
  }
  std::vector<PartitionRow> out;
  for (auto& [key, r] : rows) {
    r.orbits = r.systems / r.orbit_size;
    out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const PartitionRow& x, const PartitionRow& y) {
    return x.pairs != y.pairs ? x.pairs > y.pairs : x.orbit_size < y.orbit_size;
  });
  return out;
}

}  // namespace w160::f2
