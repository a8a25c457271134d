#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stablenorm/config.hpp"

namespace sn::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Each command writes its files into cfg.out_dir and a report to `out`;
// returns an exit code. Usage problems throw UsageError.
int cmd_build(const RunConfig& cfg, const std::vector<std::string>& args, std::ostream& out);
int cmd_stable_ball(const RunConfig& cfg, std::ostream& out);
int cmd_classify(const RunConfig& cfg, std::ostream& out);
int cmd_selftest(const RunConfig& cfg, std::ostream& out);

// File names inside the output directory.
inline const char* kSpaceFile = "space.txt";
inline const char* kBuilderFile = "builder.yaml";
inline const char* kBallCsv = "ball.csv";
inline const char* kEstimatesCsv = "estimates.csv";
inline const char* kHullFile = "hull.txt";
inline const char* kBoundCsv = "bound.csv";
inline const char* kBallReport = "ball_report.txt";
inline const char* kClassifyCsv = "classify.csv";
inline const char* kClassifyRecords = "classify.jsonl";
inline const char* kTranscript = "construction.log";

}  // namespace sn::cli
