#include "w160/steiner_partition.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <thread>
#include <tuple>

namespace w160 {

namespace {

struct Binomials {
  std::array<std::array<std::int64_t, 5>, kNumThetas + 1> c{};
  Binomials() {
    for (int n = 0; n <= kNumThetas; ++n) {
      c[n][0] = 1;
      for (int k = 1; k <= 4; ++k) c[n][k] = n == 0 ? 0 : c[n - 1][k - 1] + c[n - 1][k];
    }
  }
};

const Binomials& binom() {
  static const Binomials b;
  return b;
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

ThetaPair make_pair_sorted(int a, int b) { return a < b ? ThetaPair{a, b} : ThetaPair{b, a}; }

// The table stated for the Wiman curve: (pairs, systems, orbits, orbit size).
const std::vector<f2::PartitionRow> kExpectedTable = {{48, 15, 3, 5}, {32, 15, 3, 5}, {24, 480, 12, 40}};

void fail(int code, const std::string& msg) { throw CertificationError(code, msg); }

}  // namespace

std::int64_t quad_rank(const Quad& q) {
  const auto& c = binom().c;
  return c[q[0]][1] + c[q[1]][2] + c[q[2]][3] + c[q[3]][4];
}

Quad quad_unrank(std::int64_t r) {
  const auto& c = binom().c;
  Quad q{};
  int hi = kNumThetas - 1;
  for (int k = 4; k >= 1; --k) {
    while (c[hi][k] > r) --hi;
    q[k - 1] = hi;
    r -= c[hi][k];
    --hi;
  }
  return q;
}

int pair_rank(ThetaPair p) { return p.second * (p.second - 1) / 2 + p.first; }

ThetaPair pair_unrank(int r) {
  int b = 1;
  while ((b + 1) * b / 2 <= r) ++b;
  return {r - b * (b - 1) / 2, b};
}

Quad act_on_quad(const GroupElement& g, const Quad& q) {
  const auto& m = model();
  Quad out{};
  for (int k = 0; k < 4; ++k) out[k] = m.act_on_theta(g, q[k]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<OrbitRep> orbit_representatives() {
  std::vector<bool> seen(kNumQuads, false);
  std::vector<OrbitRep> reps;
  reps.reserve(kNumQuads / kGroupOrder + 4096);
  Quad q{};
  for (q[0] = 0; q[0] < kNumThetas; ++q[0])
    for (q[1] = q[0] + 1; q[1] < kNumThetas; ++q[1])
      for (q[2] = q[1] + 1; q[2] < kNumThetas; ++q[2])
        for (q[3] = q[2] + 1; q[3] < kNumThetas; ++q[3]) {
          if (seen[quad_rank(q)]) continue;
          OrbitRep rep{q, 0};
          for (int g = 0; g < kGroupOrder; ++g) {
            const auto r = quad_rank(act_on_quad(GroupElement::from_id(g), q));
            if (!seen[r]) {
              seen[r] = true;
              ++rep.orbit_size;
            }
          }
          reps.push_back(rep);
        }
  return reps;
}

SweepResult sweep(const SweepOptions& opt) {
  SweepResult res;
  res.reps = orbit_representatives();
  if (opt.max_reps && opt.max_reps < res.reps.size()) res.reps.resize(opt.max_reps);
  const std::size_t total = res.reps.size();
  std::vector<QuadrupleTrace> traces(total);
  model();  // build the singleton before workers start

  constexpr std::size_t kChunk = 512;
  const int nthreads = std::max(1, opt.threads);
  std::atomic<std::size_t> next{0}, done{0};
  std::atomic<bool> failed{false};
  std::vector<std::exception_ptr> errors(nthreads);
  auto worker = [&](int id) {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= total || failed.load()) break;
        const std::size_t end = std::min(total, begin + kChunk);
        for (std::size_t i = begin; i < end; ++i) traces[i] = certify_quadruple(res.reps[i].quad, opt.policy, opt.bands);
        done.fetch_add(end - begin);
      }
    } catch (...) {
      errors[id] = std::current_exception();
      failed.store(true);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
  if (opt.progress) {
    while (done.load() < total && !failed.load()) {
      opt.progress(done.load(), total);
      std::this_thread::sleep_for(std::chrono::milliseconds(500));
    }
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  if (opt.progress) opt.progress(total, total);

  auto& st = res.stats;
  st.representatives = total;
  for (int s = 1; s <= 3; ++s) st.worst[s].min_high = std::numeric_limits<double>::infinity();
  res.verdicts.reserve(total);
  for (const auto& tr : traces) {
    res.verdicts.push_back(tr.verdict);
    if (tr.verdict.certified)
      ++st.certified_at[tr.verdict.stage];
    else {
      ++st.candidates;
      ++st.candidate_reason[static_cast<int>(tr.verdict.reason)];
    }
    const std::array<const StageStats*, 4> per = {nullptr, &tr.s1, &tr.s2, &tr.s3};
    for (int s = 1; s <= 3; ++s) {
      if (!per[s]->ran) continue;
      auto& w = st.worst[s];
      w.ran = true;
      w.max_low = std::max(w.max_low, per[s]->max_low);
      w.min_high = std::min(w.min_high, per[s]->min_high);
      w.inflation = std::max(w.inflation, per[s]->inflation);
    }
  }
  return res;
}

PartitionResult build_partition(const SweepResult& sw) {
  PartitionResult out;
  out.stats = sw.stats;
  if (sw.verdicts.size() != sw.reps.size()) fail(kFailPartition, "verdicts do not match representatives");

  // A and the union of the three pairings of each of its quads
  std::vector<bool> in_a(kNumQuads, false);
  UnionFind uf(kNumPairs);
  auto pr = [](int a, int b) { return pair_rank(make_pair_sorted(a, b)); };
  for (std::size_t i = 0; i < sw.reps.size(); ++i) {
    if (sw.verdicts[i].certified) continue;
    for (int g = 0; g < kGroupOrder; ++g) {
      const Quad q = act_on_quad(GroupElement::from_id(g), sw.reps[i].quad);
      const auto r = quad_rank(q);
      if (in_a[r]) continue;
      in_a[r] = true;
      ++out.a_quads;
      uf.unite(pr(q[0], q[1]), pr(q[2], q[3]));
      uf.unite(pr(q[0], q[2]), pr(q[1], q[3]));
      uf.unite(pr(q[0], q[3]), pr(q[1], q[2]));
    }
  }

  std::map<int, std::vector<ThetaPair>> by_root;
  for (int r = 0; r < kNumPairs; ++r) by_root[uf.find(r)].push_back(pair_unrank(r));
  for (auto& [root, pairs] : by_root) {
    std::sort(pairs.begin(), pairs.end());
    SteinerClass c;
    c.pairs = std::move(pairs);
    out.classes.push_back(std::move(c));
  }
  std::sort(out.classes.begin(), out.classes.end(),
            [](const SteinerClass& x, const SteinerClass& y) { return x.pairs.front() < y.pairs.front(); });
  if (out.classes.size() != 510)
    fail(kFailPartition, "relation R has " + std::to_string(out.classes.size()) + " classes, expected 510");

  out.class_of_pair.assign(kNumPairs, -1);
  for (std::size_t c = 0; c < out.classes.size(); ++c)
    for (const auto& p : out.classes[c].pairs) out.class_of_pair[pair_rank(p)] = static_cast<int>(c);

  // completeness: any two pairs of a class are disjoint and related
  std::vector<bool> explained(kNumQuads, false);
  for (const auto& c : out.classes) {
    for (std::size_t i = 0; i < c.pairs.size(); ++i)
      for (std::size_t j = i + 1; j < c.pairs.size(); ++j) {
        const auto [a, b] = c.pairs[i];
        const auto [x, y] = c.pairs[j];
        if (a == x || a == y || b == x || b == y)
          fail(kFailPartition, "class contains overlapping pairs at theta " + std::to_string(a));
        Quad q{a, b, x, y};
        std::sort(q.begin(), q.end());
        const auto r = quad_rank(q);
        if (!in_a[r]) fail(kFailPartition, "relation not transitive: pairs in one class are not related");
        if (!explained[r]) {
          explained[r] = true;
          ++out.related_quads;
        }
      }
  }
  // every quad of A was unioned, so R has no cross-class relation by
  // construction; a_quads == related_quads confirms no stray quads remain
  if (out.related_quads != out.a_quads) fail(kFailPartition, "A contains quads outside the class relation");

  // G0 maps classes to classes; orbits of classes
  std::vector<int> orbit_of(out.classes.size(), -1);
  const auto& m = model();
  for (std::size_t c = 0; c < out.classes.size(); ++c) {
    if (orbit_of[c] >= 0) continue;
    ClassOrbit orb;
    orb.pairs_per_class = static_cast<int>(out.classes[c].pairs.size());
    const int oid = static_cast<int>(out.orbits.size());
    for (int g = 0; g < kGroupOrder; ++g) {
      const auto ge = GroupElement::from_id(g);
      int image = -1;
      for (const auto& [a, b] : out.classes[c].pairs) {
        const int d = out.class_of_pair[pair_rank(make_pair_sorted(m.act_on_theta(ge, a), m.act_on_theta(ge, b)))];
        if (image < 0) image = d;
        if (d != image) fail(kFailPartition, "partition is not G0-invariant");
      }
      if (orbit_of[image] < 0) {
        orbit_of[image] = oid;
        orb.classes.push_back(image);
      }
    }
    std::sort(orb.classes.begin(), orb.classes.end());
    out.orbits.push_back(std::move(orb));
  }
  for (std::size_t c = 0; c < out.classes.size(); ++c) out.classes[c].orbit = orbit_of[c];

  // family incidence
  for (auto& c : out.classes) {
    std::map<std::pair<f2::Family, f2::Family>, int> cross;
    for (const auto& [a, b] : c.pairs) {
      auto fa = m.theta(a).family, fb = m.theta(b).family;
      if (fa == fb) {
        ++c.within_family;
        continue;
      }
      if (fb < fa) std::swap(fa, fb);
      ++cross[{fa, fb}];
    }
    for (const auto& [fp, n] : cross) {
      c.family_pairs.push_back(fp);
      c.family_pair_counts.push_back(n);
    }
  }

  // census table
  std::map<std::pair<int, int>, f2::PartitionRow> rows;
  for (const auto& orb : out.orbits) {
    auto& row = rows[{orb.pairs_per_class, static_cast<int>(orb.classes.size())}];
    row.pairs = orb.pairs_per_class;
    row.orbit_size = static_cast<int>(orb.classes.size());
    row.systems += row.orbit_size;
    ++row.orbits;
  }
  for (const auto& [key, row] : rows) out.table.push_back(row);
  std::sort(out.table.begin(), out.table.end(),
            [](const auto& x, const auto& y) { return std::tie(y.pairs, y.orbit_size) < std::tie(x.pairs, x.orbit_size); });
  if (out.table != kExpectedTable) fail(kFailCensus, "census table differs from {48x15, 32x15, 24x480}");
  return out;
}

CrosscheckReport crosscheck_f2(const PartitionResult& result) {
  CrosscheckReport rep;
  auto mismatch = [&](const std::string& s) {
    rep.ok = false;
    rep.mismatches.push_back(s);
  };

  using Key = std::tuple<int, int, int, int>;  // pairs, within, family pairs, orbit size
  std::vector<Key> numeric, predicted;
  for (const auto& c : result.classes) {
    numeric.emplace_back(static_cast<int>(c.pairs.size()), c.within_family, static_cast<int>(c.family_pairs.size()),
                         static_cast<int>(result.orbits[c.orbit].classes.size()));
    rep.within_family_total += c.within_family;
    rep.cross_family_total += static_cast<int>(c.pairs.size()) - c.within_family;
    if (c.within_family == 0) {
      if (c.family_pairs.size() != 3) mismatch("cross-family class meets " + std::to_string(c.family_pairs.size()) + " family pairs");
      for (int n : c.family_pair_counts)
        if (n != 8) mismatch("cross-family class has a family pair with " + std::to_string(n) + " pairs");
    }
  }
  for (const auto& s : f2::predict_systems()) predicted.emplace_back(s.pairs, s.within_family, s.family_pairs, s.orbit_size);
  std::sort(numeric.begin(), numeric.end());
  std::sort(predicted.begin(), predicted.end());
  if (numeric != predicted) mismatch("class (size, within-family, family pairs, orbit size) multiset differs");
  if (result.table != f2::predict_partition_table()) mismatch("partition table differs from the F2 prediction");

  // every cross-family difference occurs with multiplicity 8
  const auto fams = f2::families();
  for (std::size_t x = 0; x < fams.size(); ++x)
    for (std::size_t y = x + 1; y < fams.size(); ++y)
      for (const auto& [mu, n] : f2::predict_difference_multiset(fams[x], fams[y]))
        if (n != 8) mismatch("F2 cross difference multiplicity " + std::to_string(n));

  int pred_within = 0, pred_cross = 0;
  for (const auto& s : f2::predict_systems()) {
    pred_within += s.within_family;
    pred_cross += s.pairs - s.within_family;
  }
  if (pred_within != rep.within_family_total) mismatch("within-family total differs");
  if (pred_cross != rep.cross_family_total) mismatch("cross-family total differs");
  return rep;
}

InvarianceReport sample_verdict_invariance(const SweepResult& sw, std::size_t samples, std::uint64_t seed,
                                           const SweepOptions& opt) {
  InvarianceReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, sw.reps.size() - 1);
  std::uniform_int_distribution<int> grp(0, kGroupOrder - 1);
  for (std::size_t k = 0; k < samples; ++k) {
    const std::size_t i = pick(rng);
    const Quad q = act_on_quad(GroupElement::from_id(grp(rng)), sw.reps[i].quad);
    const auto tr = certify_quadruple(q, opt.policy, opt.bands);
    ++rep.samples;
    if (tr.verdict.certified != sw.verdicts[i].certified) ++rep.mismatches;
  }
  return rep;
}

}  // namespace w160
