#include "w160/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

namespace w160 {

namespace {

[[noreturn]] void bad_input(const std::string& what) { throw CertificationError(kFailInput, what); }

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json header(const char* kind) {
  return {{"schema_version", kSchemaVersion}, {"kind", kind}, {"generated_at", utc_now()}};
}

json rational_to_json(const Rational& r) {
  auto part = [](const mpz_class& z) -> json {
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();
  };
  return json::array({part(r.get_num()), part(r.get_den())});
}

mpz_class integer_from_json(const json& j) {
  if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
  if (j.is_string()) return mpz_class(j.get<std::string>());
  bad_input("expected an integer");
}

json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

json complex_vec(const CVec& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_to_json(v(k)));
  return out;
}

json stats_to_json(const StageStats& s) {
  return {{"ran", s.ran}, {"max_low", s.max_low}, {"min_high", s.ran ? json(s.min_high) : json(nullptr)},
          {"inflation", s.inflation}};
}

json quad_json(const Quad& q) { return json::array({q[0], q[1], q[2], q[3]}); }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad_input("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    bad_input(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const json& j, std::ostream& log) {
  std::ofstream out(path);
  if (!out) bad_input("cannot write " + path);
  out << j.dump(1) << '\n';
  log << "wrote " << path << '\n';
}

void check_schema(const json& j, const char* kind) {
  if (!j.is_object() || j.value("schema_version", -1) != kSchemaVersion || j.value("kind", "") != kind)
    bad_input(std::string("not a version ") + std::to_string(kSchemaVersion) + " " + kind + " document");
}

SweepOptions sweep_options(const RunConfig& cfg) {
  SweepOptions opt;
  opt.threads = cfg.threads;
  opt.policy = cfg.policy;
  opt.bands = cfg.bands;
  return opt;
}

struct PartitionRun {
  SweepResult sweep;
  PartitionResult partition;
  CrosscheckReport cross;
  InvarianceReport invariance;
};

PartitionRun run_partition(const RunConfig& cfg, std::ostream& log) {
  PartitionRun run;
  SweepOptions opt = sweep_options(cfg);
  auto last = std::chrono::steady_clock::now();
  opt.progress = [&](std::size_t done, std::size_t total) {
    const auto now = std::chrono::steady_clock::now();
    if (now - last < std::chrono::seconds(5) && done != total) return;
    last = now;
    log << "sweep " << done << "/" << total << '\n';
  };
  run.sweep = sweep(opt);
  run.partition = build_partition(run.sweep);
  run.cross = crosscheck_f2(run.partition);
  if (!run.cross.ok) {
    std::string msg = "F2 crosscheck failed";
    if (!run.cross.mismatches.empty()) msg += ": " + run.cross.mismatches.front();
    throw CertificationError(kFailOracle, msg);
  }
  if (cfg.invariance_samples) {
    run.invariance = sample_verdict_invariance(run.sweep, cfg.invariance_samples, 1, opt);
    if (run.invariance.mismatches)
      throw CertificationError(kFailPartition, std::to_string(run.invariance.mismatches) + " verdicts not G0-invariant");
  }
  return run;
}

std::string out_path(const RunConfig& cfg, const char* fallback) { return cfg.out.empty() ? fallback : cfg.out; }

}  // namespace

int default_threads() {
  if (const char* env = std::getenv("W160_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0 && n <= 1024) return static_cast<int>(n);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void validate_bands(const RunConfig& cfg) {
  auto check = [](const char* name, const Bands& b) {
    if (!(b.low_max >= 0 && b.low_max < b.high_min && b.high_min <= b.high_max))
      bad_input(std::string("band ") + name + " must satisfy 0 <= low_max < high_min <= high_max");
  };
  check("stage1", cfg.bands.stage1);
  check("stage2", cfg.bands.stage2);
  check("stage3", cfg.bands.stage3);
  check("span", cfg.span.span);
  check("stack", cfg.span.stack);
  if (cfg.threads < 1) bad_input("threads must be positive");
}

json field_to_json(const FieldElem& x) {
  json out = json::array();
  for (const auto& c : x.coeffs()) out.push_back(rational_to_json(c));
  return out;
}

FieldElem field_from_json(const json& j) {
  if (!j.is_array() || j.size() != FieldElem::kDim) bad_input("field element needs 8 coordinates");
  std::array<Rational, FieldElem::kDim> c;
  for (int k = 0; k < FieldElem::kDim; ++k) {
    const json& pr = j[k];
    if (!pr.is_array() || pr.size() != 2) bad_input("field coordinate must be [num, den]");
    const mpz_class den = integer_from_json(pr[1]);
    if (den == 0) bad_input("zero denominator");
    c[k] = Rational(integer_from_json(pr[0]), den);
    c[k].canonicalize();
  }
  return FieldElem::from_coeffs(c);
}

json bands_to_json(const Bands& b) { return {{"low_max", b.low_max}, {"high_min", b.high_min}, {"high_max", b.high_max}}; }

json config_to_json(const RunConfig& cfg) {
  return {{"command", cfg.command},
          {"threads", cfg.threads},
          {"mult4_policy", cfg.policy == Mult4Policy::TestAsTriple ? "test-as-triple" : "candidate"},
          {"bands",
           {{"stage1", bands_to_json(cfg.bands.stage1)},
            {"stage2", bands_to_json(cfg.bands.stage2)},
            {"stage3", bands_to_json(cfg.bands.stage3)},
            {"span", bands_to_json(cfg.span.span)},
            {"stack", bands_to_json(cfg.span.stack)}}},
          {"overrides", cfg.overrides}};
}

json model_to_json() {
  json j = header("model");
  j["field"] = {{"generators", {"a", "i"}},
                {"relations", {"a^4 + a^2 - 1 = 0", "i^2 + 1 = 0"}},
                {"basis", "a^k i^e at index k + 4 e"}};
  json pts = json::array();
  for (const auto& p : model().points()) {
    json ex = json::array(), ap = json::array();
    for (int k = 0; k < 5; ++k) {
      ex.push_back(field_to_json(p.exact[k]));
      ap.push_back(complex_to_json(p.approx[k]));
    }
    pts.push_back({{"index", p.index}, {"exact", ex}, {"float", ap}, {"zero_coord", p.zero_coord}, {"eps", p.eps()}});
  }
  j["points"] = pts;
  json th = json::array();
  for (const auto& t : model().thetas())
    th.push_back({{"index", t.index},
                  {"points", t.points},
                  {"family", json::array({t.family.first, t.family.second})}});
  j["thetas"] = th;
  json qs = json::array();
  for (const auto& d : {quadric_A(), quadric_plus(), quadric_minus()}) {
    json c = json::array();
    for (const auto& x : d.coeffs) c.push_back(field_to_json(x));
    qs.push_back({{"label", d.label}, {"diagonal", c}});
  }
  j["i2_quadrics"] = qs;
  return j;
}

json partition_to_json(const PartitionResult& p, const CrosscheckReport& cross, const InvarianceReport& inv,
                       const RunConfig& cfg) {
  json j = header("partition");
  j["config"] = config_to_json(cfg);
  const SweepStats& s = p.stats;
  json reasons = json::object();
  for (auto r : {CandidateReason::KernelFound, CandidateReason::KernelDimGt1, CandidateReason::MultGe4,
                 CandidateReason::GapViolation})
    reasons[to_string(r)] = s.candidate_reason[static_cast<int>(r)];
  j["sweep"] = {{"representatives", s.representatives},
                {"certified_at_stage", {s.certified_at[1], s.certified_at[2], s.certified_at[3]}},
                {"candidates", s.candidates},
                {"candidate_reasons", reasons},
                {"stage_margins", {stats_to_json(s.worst[1]), stats_to_json(s.worst[2]), stats_to_json(s.worst[3])}},
                {"a_quads", p.a_quads},
                {"related_quads", p.related_quads},
                {"invariance_samples", inv.samples},
                {"invariance_mismatches", inv.mismatches}};
  json table = json::array();
  for (const auto& r : p.table)
    table.push_back({{"pairs", r.pairs}, {"systems", r.systems}, {"orbits", r.orbits}, {"orbit_size", r.orbit_size}});
  j["census"] = table;
  j["f2_crosscheck"] = {{"ok", cross.ok},
                        {"within_family_total", cross.within_family_total},
                        {"cross_family_total", cross.cross_family_total},
                        {"mismatches", cross.mismatches}};
  json orbits = json::array();
  for (const auto& o : p.orbits) orbits.push_back({{"classes", o.classes}, {"pairs_per_class", o.pairs_per_class}});
  j["orbits"] = orbits;
  json classes = json::array();
  for (std::size_t c = 0; c < p.classes.size(); ++c) {
    const auto& k = p.classes[c];
    json pairs = json::array();
    for (const auto& [a, b] : k.pairs) pairs.push_back({a, b});
    classes.push_back({{"id", c}, {"orbit", k.orbit}, {"within_family", k.within_family}, {"pairs", pairs}});
  }
  j["classes"] = classes;
  return j;
}

PartitionResult partition_from_json(const json& j) {
  check_schema(j, "partition");
  PartitionResult p;
  try {
    p.class_of_pair.assign(kNumPairs, -1);
    for (const auto& c : j.at("classes")) {
      SteinerClass k;
      k.orbit = c.at("orbit").get<int>();
      k.within_family = c.at("within_family").get<int>();
      const int id = static_cast<int>(p.classes.size());
      if (c.at("id").get<int>() != id) bad_input("class ids must be consecutive from 0");
      for (const auto& pr : c.at("pairs")) {
        const int a = pr.at(0).get<int>(), b = pr.at(1).get<int>();
        if (a < 0 || b >= kNumThetas || a >= b) bad_input("invalid theta pair");
        int& slot = p.class_of_pair[pair_rank({a, b})];
        if (slot != -1) bad_input("theta pair listed twice");
        slot = id;
        k.pairs.emplace_back(a, b);
      }
      p.classes.push_back(std::move(k));
    }
    for (int s : p.class_of_pair)
      if (s == -1) bad_input("classes do not cover every theta pair");
    for (const auto& o : j.at("orbits")) {
      ClassOrbit orb;
      orb.classes = o.at("classes").get<std::vector<int>>();
      orb.pairs_per_class = o.at("pairs_per_class").get<int>();
      for (int c : orb.classes)
        if (c < 0 || c >= static_cast<int>(p.classes.size())) bad_input("orbit lists an unknown class");
      p.orbits.push_back(std::move(orb));
    }
    for (const auto& r : j.at("census"))
      p.table.push_back({r.at("pairs").get<int>(), r.at("systems").get<int>(), r.at("orbits").get<int>(),
                         r.at("orbit_size").get<int>()});
    p.a_quads = j.at("sweep").at("a_quads").get<std::size_t>();
  } catch (const json::exception& e) {
    bad_input(std::string("partition document: ") + e.what());
  }
  return p;
}

json ic2_to_json(const Ic2Certificate& cert, const ReconstructReport& rec, const RunConfig& cfg) {
  json j = header("ic2_report");
  j["config"] = config_to_json(cfg);
  json classes = json::array();
  for (const auto& r : cert.reports) {
    json jc = {{"id", r.class_id}, {"quadrics", r.quadric_count}, {"usable", r.usable}};
    if (r.usable) {
      jc["span_dim"] = r.span_dim;
      jc["max_low"] = r.max_low;
      jc["min_high"] = r.min_high;
      jc["inflation"] = r.inflation;
      jc["span_residual"] = r.span_residual;
      jc["block_magnitude"] = {{"R1", r.block_magnitude[0]},
                               {"R2", r.block_magnitude[1]},
                               {"R3", r.block_magnitude[2]},
                               {"R4", r.block_magnitude[3]},
                               {"R5", r.block_magnitude[4]}};
    }
    classes.push_back(jc);
  }
  j["classes"] = classes;
  json quadrics = json::array();
  for (Eigen::Index c = 0; c < cert.intersection.cols(); ++c) quadrics.push_back(complex_vec(cert.intersection.col(c)));
  j["intersection"] = {{"dim13_classes", cert.dim13_classes},
                       {"good_orbits", cert.good_orbits},
                       {"stacked_rows", cert.stacked_rows},
                       {"stacked_rank", cert.stacked_rank},
                       {"stack_max_low", cert.stack_max_low},
                       {"stack_min_high", cert.stack_min_high},
                       {"stack_inflation", cert.stack_inflation},
                       {"dimension", cert.intersection_dim},
                       {"monomial_order", "x_i x_k, i <= k, lexicographic"},
                       {"quadrics", quadrics},
                       {"mutual_residual", cert.mutual_residual},
                       {"point_residual", cert.point_residual},
                       {"equivariance_residual", cert.equivariance_residual}};
  j["reconstruction"] = {{"special_residual", rec.special_residual},
                         {"samples", rec.samples},
                         {"sample_residual", rec.sample_residual},
                         {"sample_on_curve", rec.sample_on_curve},
                         {"offcurve_residual", rec.offcurve_residual}};
  j["certified"] = cert.certified;
  return j;
}

json witness_to_json(const Witness& w) {
  json q = json::array();
  for (const auto& x : w.quads) q.push_back(quad_json(x));
  json pairs = json::array();
  for (const auto& [a, b] : w.class_pairs) pairs.push_back({a, b});
  return {{"class_id", w.class_id}, {"quadruples", q}, {"class_pairs", pairs}};
}

Witness witness_from_json(const json& j) {
  Witness w;
  try {
    w.class_id = j.value("class_id", -1);
    for (const auto& q : j.at("quadruples")) {
      Quad x{};
      if (!q.is_array() || q.size() != 4) bad_input("quadruple must have 4 entries");
      for (int k = 0; k < 4; ++k) x[k] = q[k].get<int>();
      std::sort(x.begin(), x.end());
      for (int t : x)
        if (t < 0 || t >= kNumThetas) bad_input("theta index out of range");
      w.quads.push_back(x);
    }
    if (j.contains("class_pairs"))
      for (const auto& pr : j.at("class_pairs")) {
        int a = pr.at(0).get<int>(), b = pr.at(1).get<int>();
        if (a > b) std::swap(a, b);
        w.class_pairs.emplace_back(a, b);
      }
  } catch (const json::exception& e) {
    bad_input(std::string("witness document: ") + e.what());
  }
  return w;
}

// ---------------------------------------------------------------------------

int cmd_export_model(const RunConfig& cfg, std::ostream& log) {
  write_json(out_path(cfg, "model.json"), model_to_json(), log);
  return 0;
}

int cmd_partition(const RunConfig& cfg, std::ostream& log) {
  const PartitionRun run = run_partition(cfg, log);
  log << "classes " << run.partition.classes.size() << ", |A| = " << run.partition.a_quads << '\n';
  write_json(out_path(cfg, "partition.json"), partition_to_json(run.partition, run.cross, run.invariance, cfg), log);
  return 0;
}

int cmd_certify_ic2(const RunConfig& cfg, std::ostream& log) {
  const PartitionResult p = partition_from_json(read_json(cfg.partition_path));
  const Ic2Certificate cert = intersect_and_certify(p, cfg.span);
  const ReconstructReport rec = reconstruct_check(cert.intersection);
  log << "dim-13 classes " << cert.dim13_classes << ", intersection dim " << cert.intersection_dim
      << ", mutual residual " << cert.mutual_residual << '\n';
  write_json(out_path(cfg, "ic2_report.json"), ic2_to_json(cert, rec, cfg), log);
  if (cert.dim13_classes < 240) throw CertificationError(kFailIc2, "fewer than 240 classes with span dimension 13");
  if (!(rec.special_residual <= 1e-12 && rec.sample_residual <= 1e-8 && rec.offcurve_residual >= 1e-2))
    throw CertificationError(kFailIc2, "reconstruction check failed");
  return 0;
}

int cmd_witness_find(const RunConfig& cfg, std::ostream& log) {
  const PartitionResult p = partition_from_json(read_json(cfg.partition_path));
  json j = header("witness");
  json list = json::array();
  std::vector<int> disconnected;
  const int nc = static_cast<int>(p.classes.size());
  if (cfg.witness_class >= nc) bad_input("no class " + std::to_string(cfg.witness_class));
  for (int c = 0; c < nc; ++c) {
    if (cfg.witness_class >= 0 && c != cfg.witness_class) continue;
    if (const auto w = find_witness(c, p.classes[c].pairs)) list.push_back(witness_to_json(*w));
    else disconnected.push_back(c);
  }
  j["witnesses"] = list;
  j["disconnected_classes"] = disconnected;
  log << list.size() << " witnesses, " << disconnected.size() << " classes with a disconnected graph\n";
  write_json(out_path(cfg, "witness.json"), j, log);
  return 0;
}

int cmd_witness_verify(const RunConfig& cfg, std::ostream& log) {
  std::vector<Witness> ws;
  if (cfg.witness_file.empty()) {
    ws.push_back(reference_witness());
  } else {
    const json j = read_json(cfg.witness_file);
    check_schema(j, "witness");
    for (const auto& w : j.at("witnesses")) ws.push_back(witness_from_json(w));
  }
  bool ok = true;
  for (const auto& w : ws) {
    const WitnessCertificate c = verify_witness_exact(w, cfg.threads);
    log << "class " << w.class_id << ": " << w.quads.size() << " quadruples, " << c.vertices.size() << " pairs, "
        << (c.valid ? "valid" : "INVALID") << '\n';
    for (const auto& pr : c.problems) log << "  " << pr << '\n';
    ok = ok && c.valid;
  }
  if (!ok) throw CertificationError(kFailWitness, "witness verification failed");
  return 0;
}

int cmd_selftest(const RunConfig& cfg, std::ostream& log) {
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool pass, json detail = json::object()) {
    checks.push_back({{"check", name}, {"pass", pass}, {"detail", detail}});
    log << (pass ? "ok   " : "FAIL ") << name << '\n';
    all = all && pass;
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      record(name, false, {{"error", e.what()}});
    }
  };

  guarded("theta table", [&] {
    record("theta table", enumerate_theta_sets() == std::vector<std::array<int, 4>>(reference_theta_table().begin(),
                                                                                    reference_theta_table().end()));
  });
  guarded("points on curve", [&] {
    const auto rep = verify_points_on_curve();
    record("points on curve", rep.exact_ok && rep.max_float_residual <= 1e-14,
           {{"max_float_residual", rep.max_float_residual}});
  });
  guarded("theta hyperplanes", [&] {
    double pr = 0.0, cr = 0.0;
    for (const auto& h : theta_hyperplanes()) pr = std::max(pr, h.point_residual), cr = std::max(cr, h.contact_residual);
    record("theta hyperplanes", pr <= kHyperplaneTolerance && cr <= kHyperplaneTolerance,
           {{"point_residual", pr}, {"contact_residual", cr}});
  });
  guarded("irrep round trip", [&] {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      Quadric15 q;
      for (int k = 0; k < 15; ++k) q(k) = cd(g(rng), g(rng));
      q.normalize();
      worst = std::max(worst, (from_irrep(to_irrep(q)) - q).cwiseAbs().maxCoeff());
    }
    record("irrep round trip", worst <= 1e-14, {{"max_error", worst}});
  });
  guarded("f2 census", [&] {
    const std::vector<f2::PartitionRow> expected = {{48, 15, 3, 5}, {32, 15, 3, 5}, {24, 480, 12, 40}};
    f2::derive_sign_action();
    record("f2 census", f2::predict_partition_table() == expected);
  });
  guarded("published witness", [&] {
    const auto c = verify_witness_exact(reference_witness(), cfg.threads);
    record("published witness", c.valid, {{"pairs", c.vertices.size()}, {"quadruples", c.checks.size()}});
  });

  if (!cfg.quick) {
    guarded("partition", [&] {
      const PartitionRun run = run_partition(cfg, log);
      const auto& s = run.partition.stats;
      const std::array<const Bands*, 4> bands = {nullptr, &cfg.bands.stage1, &cfg.bands.stage2, &cfg.bands.stage3};
      bool margins = true;
      json m = json::array();
      for (int st = 1; st <= 3; ++st) {
        const auto& w = s.worst[st];
        // bands widened by the inflation, as in classify_gap
        margins = margins && w.max_low <= bands[st]->low_max + w.inflation &&
                  (!w.ran || w.min_high >= bands[st]->high_min - w.inflation) &&
                  bands[st]->low_max + 2 * w.inflation < bands[st]->high_min;
        m.push_back(stats_to_json(w));
      }
      record("partition: 510 classes and census", run.partition.classes.size() == 510, {{"a_quads", run.partition.a_quads}});
      record("A-side bound margins", margins, m);
      record("symplectic oracle", run.cross.ok);
      record("verdict invariance", run.invariance.mismatches == 0, {{"samples", run.invariance.samples}});
      const Ic2Certificate cert = intersect_and_certify(run.partition, cfg.span);
      int over13 = 0;
      for (const auto& r : cert.reports) over13 += r.usable && r.span_dim > 13;
      record("class spans at most 13-dimensional", over13 == 0);
      record("I2 reconstruction", cert.certified && cert.dim13_classes >= 240,
             {{"dim13_classes", cert.dim13_classes}, {"mutual_residual", cert.mutual_residual}});
    });
  }

  json j = header("selftest");
  j["config"] = config_to_json(cfg);
  j["checks"] = checks;
  j["pass"] = all;
  if (!cfg.out.empty()) write_json(cfg.out, j, log);
  if (!all) throw CertificationError(kFailSelftest, "selftest failed");
  return 0;
}

// ---------------------------------------------------------------------------

int run_cli(int argc, char** argv) {
  RunConfig cfg;
  cfg.threads = default_threads();

  CLI::App app{"Certified Steiner partition, I2 reconstruction and exact witnesses for the Wiman curve"};
  app.require_subcommand(1);
  app.add_option("--threads", cfg.threads, "worker threads (default: W160_THREADS or hardware)");

  std::vector<double> s1, s2, s3, sp, st;
  auto band_opt = [&](CLI::App* sub, const char* name, std::vector<double>& dst, const char* help) {
    sub->add_option(name, dst, help)->expected(3);
  };
  std::string policy = "test-as-triple";
  auto add_bands = [&](CLI::App* sub) {
    band_opt(sub, "--stage1", s1, "LOW_MAX HIGH_MIN HIGH_MAX");
    band_opt(sub, "--stage2", s2, "LOW_MAX HIGH_MIN HIGH_MAX");
    band_opt(sub, "--stage3", s3, "LOW_MAX HIGH_MIN HIGH_MAX");
    sub->add_option("--mult4", policy, "points of multiplicity >= 4")
        ->check(CLI::IsMember({"test-as-triple", "candidate"}));
    sub->add_option("--invariance-samples", cfg.invariance_samples, "random g.rep verdict comparisons");
  };
  auto add_span = [&](CLI::App* sub) {
    band_opt(sub, "--span", sp, "LOW_MAX HIGH_MIN HIGH_MAX");
    band_opt(sub, "--stack", st, "LOW_MAX HIGH_MIN HIGH_MAX");
  };

  auto* part = app.add_subcommand("partition", "orbit sweep and Steiner partition -> partition.json");
  part->add_option("--out", cfg.out, "output path");
  add_bands(part);

  auto* ic2 = app.add_subcommand("certify-ic2", "class spans and their intersection -> ic2_report.json");
  ic2->add_option("--partition", cfg.partition_path, "partition.json to read");
  ic2->add_option("--out", cfg.out, "output path");
  add_span(ic2);

  auto* wit = app.add_subcommand("witness", "spanning-tree witnesses");
  wit->require_subcommand(1);
  auto* find = wit->add_subcommand("find", "search witnesses -> witness.json");
  find->add_option("--partition", cfg.partition_path, "partition.json to read");
  find->add_option("--class", cfg.witness_class, "one class id (default: all)");
  find->add_option("--file,--out", cfg.out, "output path");
  auto* verify = wit->add_subcommand("verify", "exact verification (default: the published list)");
  verify->add_option("--file", cfg.witness_file, "witness.json to verify");

  auto* exp = app.add_subcommand("export-model", "points, thetas and I2 quadrics -> model.json");
  exp->add_option("--out", cfg.out, "output path");

  auto* self = app.add_subcommand("selftest", "every cross-check, including the full sweep");
  self->add_flag("--quick", cfg.quick, "skip the sweep-dependent checks");
  self->add_option("--out", cfg.out, "write the check list as JSON");
  add_bands(self);
  add_span(self);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kFailInput;
  }

  auto apply = [&](const char* name, const std::vector<double>& v, Bands& b) {
    if (v.empty()) return;
    b = {v[0], v[1], v[2]};
    std::ostringstream s;
    s << name << " = [0," << v[0] << "] u [" << v[1] << "," << v[2] << "]";
    cfg.overrides.push_back(s.str());
  };
  apply("stage1", s1, cfg.bands.stage1);
  apply("stage2", s2, cfg.bands.stage2);
  apply("stage3", s3, cfg.bands.stage3);
  apply("span", sp, cfg.span.span);
  apply("stack", st, cfg.span.stack);
  cfg.policy = policy == "candidate" ? Mult4Policy::Candidate : Mult4Policy::TestAsTriple;
  if (cfg.policy == Mult4Policy::Candidate) cfg.overrides.push_back("mult4 = candidate");

  try {
    validate_bands(cfg);
    const std::vector<std::pair<CLI::App*, int (*)(const RunConfig&, std::ostream&)>> table = {
        {part, cmd_partition},       {ic2, cmd_certify_ic2}, {find, cmd_witness_find},
        {verify, cmd_witness_verify}, {exp, cmd_export_model}, {self, cmd_selftest}};
    for (const auto& [sub, fn] : table) {
      if (!*sub) continue;
      cfg.command = sub == find || sub == verify ? "witness " + sub->get_name() : sub->get_name();
      return fn(cfg, std::cerr);
    }
  } catch (const CertificationError& e) {
    std::cerr << json{{"schema_version", kSchemaVersion}, {"failure", {{"code", e.code()}, {"message", e.what()}}}}.dump()
              << '\n';
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << json{{"schema_version", kSchemaVersion}, {"failure", {{"code", kFailModel}, {"message", e.what()}}}}.dump()
              << '\n';
    return kFailModel;
  }
  return kFailInput;
}

}  // namespace w160
