#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bcp/duality.hpp"
#include "bcp/geomfix.hpp"
#include "bcp/measures.hpp"
#include "bcp/recursions.hpp"
#include "bcp/simulate.hpp"

namespace bcp::io {

inline constexpr const char* kLibraryVersion = "1.0.0";

// {"m0": .., "m1": .., "interior": {"type": "zero" | "uniform" | "beta" | "atoms", ...}}
//   uniform: {"c": ..}; beta: {"a": .., "b": .., "mass": ..}; atoms: {"atoms": [[x, mass], ...]}
// Missing m0, m1 default to 0; missing c and mass default to 1. Throws SpecError.
LambdaMeasure parse_measure(const nlohmann::json& j);
LambdaMeasure load_measure(const std::string& path);
nlohmann::json measure_to_json(const LambdaMeasure& m);

nlohmann::json params_json(const ModelParams& p);
nlohmann::json params_json(const MoranParams& p);
nlohmann::json pmf_diagnostics(const StationaryPmf& pmf);

// CSV writers; every file starts with a header row.
void write_pmf_csv(std::ostream& os, const StationaryPmf& pmf);                        // n,p_n,a_n
void write_path_csv(std::ostream& os, const sim::JumpPath& path);                     // state,holding_time
void write_occupancy_csv(std::ostream& os, const sim::OccupancyEstimate& occ);        // state,weight
void write_atoms_csv(std::ostream& os, const AtomicMeasure& mu);                      // k,location,mass
void write_moments_csv(std::ostream& os, const MomentSequence& w);                    // n,w_n
void write_generating_csv(std::ostream& os, const BsGenerating& g);                   // s,w

// Shortest round-trip representation of a double.
std::string fmt_double(double x);

}  // namespace bcp::io
