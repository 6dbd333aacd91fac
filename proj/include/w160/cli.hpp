#pragma once

// Batch commands, run configuration and the JSON artifacts they exchange:
// model.json, partition.json, ic2_report.json, witness.json.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "w160/ic2_reconstruction.hpp"
#include "w160/witness.hpp"

namespace w160 {

inline constexpr int kSchemaVersion = 1;

using json = nlohmann::json;

struct RunConfig {
  std::string command;
  int threads = 1;
  TangencyBands bands;
  SpanBands span;
  Mult4Policy policy = Mult4Policy::TestAsTriple;
  std::string out;             // output artifact path ("" = default name)
  std::string partition_path = "partition.json";
  std::string witness_file;    // "" = the published list
  int witness_class = -1;      // -1 = every class with a connected graph
  bool verify_only = false;
  bool quick = false;          // selftest without the sweep
  std::size_t invariance_samples = 10000;
  std::vector<std::string> overrides;  // human-readable, logged into reports
};

/// W160_THREADS when set to a positive integer, else the hardware thread count.
int default_threads();

/// Throws CertificationError(kFailInput) when a band is empty or the two
/// bands overlap.
void validate_bands(const RunConfig& cfg);

json field_to_json(const FieldElem& x);
FieldElem field_from_json(const json& j);

json bands_to_json(const Bands& b);
json config_to_json(const RunConfig& cfg);

json model_to_json();

json partition_to_json(const PartitionResult& p, const CrosscheckReport& cross, const InvarianceReport& inv,
                       const RunConfig& cfg);
/// Classes, orbits and the pair lookup; the pairs must cover all 12720
/// exactly once.  Throws CertificationError(kFailInput).
PartitionResult partition_from_json(const json& j);

json ic2_to_json(const Ic2Certificate& cert, const ReconstructReport& rec, const RunConfig& cfg);

json witness_to_json(const Witness& w);
Witness witness_from_json(const json& j);

int cmd_export_model(const RunConfig& cfg, std::ostream& log);
int cmd_partition(const RunConfig& cfg, std::ostream& log);
int cmd_certify_ic2(const RunConfig& cfg, std::ostream& log);
int cmd_witness_find(const RunConfig& cfg, std::ostream& log);
int cmd_witness_verify(const RunConfig& cfg, std::ostream& log);
int cmd_selftest(const RunConfig& cfg, std::ostream& log);

/// Parses argv, dispatches, and maps CertificationError codes to the exit
/// status; failures are also printed to stderr as one JSON record.
int run_cli(int argc, char** argv);

}  // namespace w160
