#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nodal/config.hpp"

namespace nodal {

enum class Verdict { Pass, CertificationFailure, SolverFailure, ConfigurationFailure };

const char* verdict_name(Verdict v);

struct StageRecord {
  std::string name;
  CertificationReport report;
  double seconds = 0.0;
  bool mandatory = true;
  std::string error;  // message of a hard error that stopped the run here
};

struct DerivedValue {
  std::string key;
  double value = 0.0;
  std::string definition;
};

struct Table {
  std::string file;
  std::string description;
  std::string content;
};

struct RunReport {
  RunConfig config;
  std::vector<StageRecord> stages;
  std::vector<DerivedValue> values;
  std::vector<Table> tables;
  Verdict verdict = Verdict::Pass;
  std::string message;

  int exit_code() const;
  const DerivedValue* value(const std::string& key) const;
  const CheckResult* check(const std::string& id) const;
  // key = value blocks; no timing, byte-identical for identical configs
  void write_dat(std::ostream& os) const;
  // human summary with timing
  void write_text(std::ostream& os) const;
};

// Executes the stage list of config.mode. Hard errors end the run with the
// matching verdict instead of propagating.
RunReport run(const RunConfig& config);

struct SweepRow {
  double p1 = 0.0, p2 = 0.0;
  LadderRow row;
  CertificationReport report;
};

// One row per (p, lambda, theta, delta) combination, evaluated in parallel
// and returned in input order.
std::vector<SweepRow> sweep(const RunConfig& config);
std::string sweep_table(const std::vector<SweepRow>& rows);

// Invariant suite of every module at desk scale.
CertificationReport verify_suite(const RunConfig& config);

// report.txt, report.dat, the tables and manifest.tsv under dir.
void write_outputs(const RunReport& report, const std::string& dir);

}  // namespace nodal
