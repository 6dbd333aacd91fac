#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "w160/cli.hpp"

using namespace w160;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "w160cert");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "w160_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

FieldElem random_elem(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-50, 50), den(1, 30);
  std::array<Rational, FieldElem::kDim> c;
  for (auto& x : c) {
    x = Rational(num(rng), den(rng));
    x.canonicalize();
  }
  return FieldElem::from_coeffs(c);
}

}  // namespace

TEST(Cli, FieldElementsRoundTrip) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const FieldElem x = random_elem(rng);
    const json j = field_to_json(x);
    ASSERT_EQ(j.size(), 8u);
    for (const auto& pr : j) ASSERT_EQ(pr.size(), 2u);
    EXPECT_TRUE(field_from_json(json::parse(j.dump())) == x);
  }
  // numerators beyond 64 bits travel as strings
  Rational r(mpz_class("123456789012345678901234567890"), mpz_class(7));
  r.canonicalize();
  const FieldElem big(r);
  const json j = field_to_json(big);
  EXPECT_TRUE(j[0][0].is_string());
  EXPECT_TRUE(field_from_json(j) == big);
}

TEST(Cli, FieldElementRejectsMalformed) {
  EXPECT_THROW(field_from_json(json::array({1, 2})), CertificationError);
  json zero_den = field_to_json(FieldElem(1));
  zero_den[3] = {1, 0};
  EXPECT_THROW(field_from_json(zero_den), CertificationError);
}

TEST(Cli, ModelExportCarriesExactPoints) {
  const json j = model_to_json();
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  ASSERT_EQ(j["points"].size(), 40u);
  ASSERT_EQ(j["thetas"].size(), 160u);
  for (const auto& p : j["points"]) {
    const auto& src = model().point(p["index"].get<int>());
    for (int k = 0; k < 5; ++k) EXPECT_TRUE(field_from_json(p["exact"][k]) == src.exact[k]);
  }
  json a = model_to_json(), b = model_to_json();
  a.erase("generated_at"), b.erase("generated_at");
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Cli, WitnessRoundTrip) {
  Witness w = reference_witness();
  w.class_id = 8;
  const Witness back = witness_from_json(json::parse(witness_to_json(w).dump()));
  EXPECT_EQ(back.class_id, 8);
  EXPECT_EQ(back.quads, w.quads);
  EXPECT_TRUE(back.class_pairs.empty());
}

TEST(Cli, PartitionDocumentMustCoverEveryPair) {
  json j = {{"schema_version", kSchemaVersion}, {"kind", "partition"}, {"sweep", {{"a_quads", 0}}},
            {"census", json::array()}, {"orbits", json::array()}};
  json pairs = json::array();
  for (int r = 0; r < kNumPairs; ++r) {
    const auto [a, b] = pair_unrank(r);
    pairs.push_back({a, b});
  }
  j["classes"] = json::array({{{"id", 0}, {"orbit", 0}, {"within_family", 0}, {"pairs", pairs}}});
  const PartitionResult p = partition_from_json(j);
  EXPECT_EQ(p.classes.size(), 1u);
  EXPECT_EQ(p.class_of_pair[pair_rank({3, 7})], 0);

  json missing = j;
  missing["classes"][0]["pairs"].erase(0);
  EXPECT_THROW(partition_from_json(missing), CertificationError);
  json twice = j;
  twice["classes"][0]["pairs"].push_back({0, 1});
  EXPECT_THROW(partition_from_json(twice), CertificationError);
  json wrong_kind = j;
  wrong_kind["kind"] = "witness";
  EXPECT_THROW(partition_from_json(wrong_kind), CertificationError);
}

TEST(Cli, BandsAreValidated) {
  RunConfig cfg;
  EXPECT_NO_THROW(validate_bands(cfg));
  cfg.bands.stage2 = {1e-2, 1e-3, 10.0};
  EXPECT_THROW(validate_bands(cfg), CertificationError);
}

TEST(Cli, ThreadCountFromEnvironment) {
  setenv("W160_THREADS", "3", 1);
  EXPECT_EQ(default_threads(), 3);
  setenv("W160_THREADS", "zero", 1);
  EXPECT_GE(default_threads(), 1);
  unsetenv("W160_THREADS");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"witness", "verify"}), 0);
  EXPECT_EQ(run({"no-such-command"}), kFailInput);
  EXPECT_EQ(run({"partition", "--stage1", "1", "0.5", "2"}), kFailInput);
  EXPECT_EQ(run({"certify-ic2", "--partition", scratch("absent.json").string()}), kFailInput);

  const auto model_path = scratch("model.json").string();
  EXPECT_EQ(run({"export-model", "--out", model_path}), 0);
  std::ifstream in(model_path);
  EXPECT_EQ(json::parse(in)["kind"], "model");

  json bad = {{"schema_version", kSchemaVersion}, {"kind", "witness"}};
  Witness w = reference_witness();
  w.quads[3] = {0, 9, 26, 84};
  bad["witnesses"] = json::array({witness_to_json(w)});
  const auto bad_path = scratch("bad_witness.json").string();
  std::ofstream(bad_path) << bad.dump();
  EXPECT_EQ(run({"witness", "verify", "--file", bad_path}), kFailWitness);
}
