#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reach/config.hpp"
#include "reach/exact.hpp"
#include "reach/synthesis.hpp"

namespace reach {

inline constexpr const char* kSchema = "reach-sampler/1";

/// 16 hex digits of FNV-1a over the compact dump of `inputs`.
std::string inputs_digest(const Json& inputs);

/// REACH_SAMPLER_SEED when set and numeric, else fallback.
std::uint64_t seed_from_env(std::uint64_t fallback = 0);

/// Top-level envelope. Only "wall_time_s" varies between identical runs.
Json make_report(const std::string& command, const std::vector<std::string>& argv, const Json& inputs,
                 const Json& settings, const Json& results, double wall_seconds, std::uint64_t seed);

Json to_json(const Partition& part);
Json to_json(const SpanResult& s);
Json to_json(const RegularityVerdict& v);
Json to_json(const LiftResidual& r);
Json to_json(const CertificateSearch& c);
Json to_json(const LinearInteriorCheck& c);
Json to_json(const SlopeReport& s);
Json to_json(const NeedlePackage& chi);
Json to_json(const SynthesisReport& r);
Json to_json(const ThresholdEstimate& e);
Json to_json(const IntervalDemoReport& r);
Json to_json(const SubsetSumResult& r);
Json to_json(const ExactPartition& p);
Json trajectory_to_json(const Trajectory& tr, int stride = 1);

/// iter,residual,alpha_norm[,z_1..z_n]
std::string trace_csv(const SynthesisReport& r);
/// N,norm,success,reason,residual
std::string profile_csv(const ThresholdEstimate& e);
/// t,x_1..x_n
std::string trajectory_csv(const Trajectory& tr, int stride = 1);

/// Finite doubles as numbers, non-finite ones as the strings "inf", "-inf", "nan".
Json number(double x);

}  // namespace reach
