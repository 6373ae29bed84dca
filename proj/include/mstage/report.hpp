#pragma once

#include <string>
#include <vector>

#include "mstage/config.hpp"
#include "mstage/harness.hpp"

namespace mstage {

// "%.17g" so doubles round-trip losslessly; '.' decimal point, LF rows.
std::string fmt_double(double v);

struct EmittedReport {
  std::string summary_line;  // key statistic + target + pass/fail when a target exists
};

// Each emitter writes <out>.report.json and <out>.data.csv and returns the
// one-line summary.
EmittedReport emit_simulate(const ExperimentConfig& cfg, const std::vector<EstimateRecord>& recs);
EmittedReport emit_rate(const ExperimentConfig& cfg, const RateReport& r);
EmittedReport emit_allocation(const ExperimentConfig& cfg, const AllocationReport& r);
EmittedReport emit_dist_check(const ExperimentConfig& cfg, const DistCheckReport& r);
EmittedReport emit_risk(const ExperimentConfig& cfg, const RiskReport& r);
EmittedReport emit_limits(const ExperimentConfig& cfg, const DriftSpec& drift,
                          const Eigen::ArrayXd& samples, long boundary_hits);
EmittedReport emit_prop33(const ExperimentConfig& cfg, const Prop33Report& r);
EmittedReport emit_asymmetry(const ExperimentConfig& cfg, const AsymmetryReport& r);

}  // namespace mstage
