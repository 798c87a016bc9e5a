#pragma once

#include <nlohmann/json_fwd.hpp>
#include <ostream>
#include <string>

#include "reserve/closed_form.hpp"
#include "reserve/discrete.hpp"
#include "reserve/distribution.hpp"
#include "reserve/montecarlo.hpp"
#include "reserve/verify.hpp"

namespace reserve {

nlohmann::json to_json(const PiecewiseCdf& dist);
PiecewiseCdf cdf_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ParametricSetting& s);
ParametricSetting setting_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EquilibriumSolution& sol);
EquilibriumSolution equilibrium_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SingleBidderSolution& sol);

nlohmann::json to_json(const VerificationReport& rep);
nlohmann::json to_json(const SimReport& rep);

/// "v,cdf" rows on an even grid plus all atoms and segment endpoints.
void write_cdf_csv(std::ostream& os, const PiecewiseCdf& dist, int grid_points);

/// "v,F,Q" rows for a solved equilibrium (even grid plus the breakpoints of
/// both distributions).
void write_solution_csv(std::ostream& os, const EquilibriumSolution& sol, int grid_points);

/// "i,r,x,q" rows, one per grid point (the top point carries x = q = 1).
void write_discrete_csv(std::ostream& os, const DiscreteEquilibrium& eq);

/// "k,dist_F,dist_Q" rows.
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

}  // namespace reserve
