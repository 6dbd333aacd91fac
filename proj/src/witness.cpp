#include "w160/witness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <thread>

namespace w160 {

namespace {

// dim I2 = 3, so a quadric outside I2 through all 16 points exists iff rank <= 11
constexpr std::size_t kMaxWitnessRank = 11;

std::array<ThetaPair, 2> pairing(const Quad& q, int k) {
  static constexpr int kOther[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
  const auto* o = kOther[k];
  return {ThetaPair{q[o[0]], q[o[1]]}, ThetaPair{q[o[2]], q[o[3]]}};
}

ExactVector diag_exact(const DiagQuadric& d) {
  ExactVector v(15);
  for (int k = 0; k < 5; ++k) v[monomial_index(k, k)] = d.coeffs[k];
  return v;
}

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a), b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

Quad quad_of(ThetaPair a, ThetaPair b) {
  Quad q{a.first, a.second, b.first, b.second};
  std::sort(q.begin(), q.end());
  return q;
}

}  // namespace

const Witness& reference_witness() {
  static const Witness w = [] {
    Witness r;
    r.quads = {{0, 9, 22, 70},    {0, 9, 24, 142},  {0, 9, 25, 82},    {0, 9, 26, 83},    {0, 9, 27, 143},
               {0, 9, 31, 42},    {0, 9, 88, 134},  {0, 9, 94, 111},   {0, 9, 114, 149},  {0, 9, 130, 154},
               {2, 20, 30, 49},   {2, 24, 49, 142}, {2, 40, 49, 71},   {2, 49, 91, 92},   {2, 49, 108, 132},
               {2, 49, 112, 129}, {2, 49, 150, 152}, {4, 7, 140, 141}, {4, 20, 30, 140},  {5, 6, 80, 81},
               {5, 20, 30, 80},   {8, 20, 30, 62},  {22, 48, 60, 70}};
    return r;
  }();
  return w;
}

bool distinct_points(const Quad& q) {
  std::set<int> pts;
  for (int t : q)
    for (int J : model().theta(t).points) pts.insert(J);
  return pts.size() == 16;
}

ExactMatrix witness_matrix(const Quad& q) {
  std::vector<int> pts;
  for (int t : q)
    for (int J : model().theta(t).points) pts.push_back(J);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  ExactMatrix m(pts.size(), 15);
  for (std::size_t r = 0; r < pts.size(); ++r) {
    const auto& x = model().point(pts[r]).exact;
    for (int i = 0; i < 5; ++i)
      for (int k = i; k < 5; ++k) m(r, monomial_index(i, k)) = x[i] * x[k];
  }
  return m;
}

QuadrupleCheck check_quadruple_exact(const Quad& q, const ModularEmbedding& emb) {
  QuadrupleCheck c;
  c.quad = q;
  c.distinct = distinct_points(q);
  const ExactMatrix m = witness_matrix(q);

  c.i2_in_kernel = true;
  for (const auto& d : {quadric_A(), quadric_plus(), quadric_minus()}) {
    const ExactVector v = diag_exact(d);
    for (std::size_t r = 0; r < m.rows() && c.i2_in_kernel; ++r) {
      FieldElem s;
      for (int k = 0; k < 15; ++k) s += m(r, k) * v[k];
      c.i2_in_kernel = s.is_zero();
    }
  }
  c.rank_mod_p = rank_mod_p(m, emb);
  // the screen can only under-estimate, so a full-rank reduction is final
  c.exact_rank = c.rank_mod_p > kMaxWitnessRank ? c.rank_mod_p : exact_rank(m);
  c.ok = c.distinct && c.i2_in_kernel && c.exact_rank <= kMaxWitnessRank;
  return c;
}

WitnessCertificate verify_witness_exact(const Witness& w, int threads) {
  WitnessCertificate cert;
  const ModularEmbedding emb = first_usable_prime(1ULL << 61);
  cert.prime = emb.p;

  cert.checks.resize(w.quads.size());
  {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(std::max(1, threads));
    auto worker = [&](int id) {
      try {
        for (std::size_t k; (k = next.fetch_add(1)) < w.quads.size();) cert.checks[k] = check_quadruple_exact(w.quads[k], emb);
      } catch (...) {
        errors[id] = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, threads); ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  bool all_ok = true;
  for (const auto& c : cert.checks) {
    if (c.ok) continue;
    all_ok = false;
    std::string msg = "quadruple [" + std::to_string(c.quad[0]) + "," + std::to_string(c.quad[1]) + "," +
                      std::to_string(c.quad[2]) + "," + std::to_string(c.quad[3]) + "]: ";
    if (!c.distinct) msg += "repeated points";
    else if (!c.i2_in_kernel) msg += "I2 not in kernel";
    else msg += "exact rank " + std::to_string(c.exact_rank);
    cert.problems.push_back(msg);
  }

  // every quadruple relates all three of its pairings; pick the one inside the class
  const std::set<ThetaPair> given(w.class_pairs.begin(), w.class_pairs.end());
  std::map<ThetaPair, int> vid;
  auto id_of = [&](ThetaPair p) { return vid.emplace(p, static_cast<int>(vid.size())).first->second; };
  if (!given.empty()) {
    for (const auto& q : w.quads) {
      int found = 0;
      for (int k = 0; k < 3; ++k) {
        const auto pr = pairing(q, k);
        if (given.count(pr[0]) && given.count(pr[1])) {
          cert.edges.push_back({q, pr[0], pr[1]});
          ++found;
        }
      }
      if (found != 1) cert.problems.push_back("quadruple without a unique pairing inside the class");
    }
  } else {
    // the class is the component reached by every quadruple exactly once
    std::vector<std::array<ThetaPair, 2>> cand;
    for (const auto& q : w.quads)
      for (int k = 0; k < 3; ++k) cand.push_back(pairing(q, k));
    for (const auto& c : cand) id_of(c[0]), id_of(c[1]);
    Dsu dsu(static_cast<int>(vid.size()));
    for (const auto& c : cand) dsu.unite(id_of(c[0]), id_of(c[1]));
    std::map<int, int> size;
    for (const auto& [p, i] : vid) ++size[dsu.find(i)];
    int best = -1;
    for (const auto& [root, n] : size)
      if (best < 0 || n > size[best]) best = root;
    for (std::size_t k = 0; k < w.quads.size(); ++k) {
      int found = 0;
      for (int j = 0; j < 3; ++j) {
        const auto& pr = cand[3 * k + j];
        if (dsu.find(id_of(pr[0])) == best) {
          cert.edges.push_back({w.quads[k], pr[0], pr[1]});
          ++found;
        }
      }
      if (found != 1) cert.problems.push_back("ambiguous pairing");
    }
  }

  std::set<ThetaPair> verts;
  for (const auto& e : cert.edges) verts.insert(e.a), verts.insert(e.b);
  cert.vertices.assign(verts.begin(), verts.end());
  std::map<ThetaPair, int> index;
  for (const auto& v : cert.vertices) index.emplace(v, static_cast<int>(index.size()));
  Dsu dsu(static_cast<int>(index.size()));
  int merges = 0;
  for (const auto& e : cert.edges) merges += dsu.unite(index[e.a], index[e.b]);
  cert.tree = !cert.vertices.empty() && merges == static_cast<int>(cert.vertices.size()) - 1 &&
              cert.edges.size() == cert.vertices.size() - 1;
  cert.spans_class = given.empty() || std::set<ThetaPair>(verts) == given;
  if (!cert.tree) cert.problems.push_back("edges do not form a spanning tree");
  if (!cert.spans_class) cert.problems.push_back("tree does not reach every pair of the class");
  cert.valid = all_ok && cert.tree && cert.spans_class && cert.problems.empty();
  return cert;
}

std::optional<Witness> find_witness(int class_id, const std::vector<ThetaPair>& pairs) {
  std::vector<ThetaPair> sorted = pairs;
  std::sort(sorted.begin(), sorted.end());
  Witness w;
  w.class_id = class_id;
  w.class_pairs = sorted;
  if (sorted.empty()) return std::nullopt;
  std::vector<bool> seen(sorted.size(), false);
  std::queue<std::size_t> bfs;
  bfs.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!bfs.empty()) {
    const std::size_t u = bfs.front();
    bfs.pop();
    for (std::size_t v = 0; v < sorted.size(); ++v) {
      if (seen[v]) continue;
      const Quad q = quad_of(sorted[u], sorted[v]);
      if (!distinct_points(q)) continue;
      seen[v] = true;
      ++reached;
      w.quads.push_back(q);
      bfs.push(v);
    }
  }
  if (reached != sorted.size()) return std::nullopt;
  return w;
}

WitnessCoverage witness_coverage(const PartitionResult& partition) {
  WitnessCoverage cov;
  cov.classes = static_cast<int>(partition.classes.size());
  for (int c = 0; c < cov.classes; ++c) {
    if (find_witness(c, partition.classes[c].pairs)) ++cov.connected;
    else cov.disconnected.push_back(c);
  }
  return cov;
}

}  // namespace w160
