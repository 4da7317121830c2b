#pragma once

#include "carnot/io.hpp"
#include "carnot/pdiff.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace carnot::cmd {

using nlohmann::json;

// Raised when a report is complete but must map to a nonzero status.
class ValidationFailure : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};
class Undecided : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};
// Numerical solver did not reach its tolerance.
class SolverFailure : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

json group_info(const GroupFile& f);
json group_validate(const GradedAlgebra& g);

json algebra_product(const GradedAlgebra& g, const QVec& x, const QVec& y);
json algebra_term(const GradedAlgebra& g, int n, const QVec& x, const QVec& y);
json algebra_decompose(int n);
json algebra_oracle(const GradedAlgebra& g, int trials, std::uint64_t seed);

// classify-epi | classify-mono | complement | quotient
json subgroups(const std::string& command, const json& request, std::uint64_t seed);

// lift | pansu | mvi | implicit | rank | blowup | verify-estimates.
// CSV tables go to out_dir; the returned summary lists them.
json experiment(const std::string& kind, const json& config, const std::string& out_dir, std::uint64_t seed,
                int threads);

// Registered maps: level_map, shear, bend, dilation, translation, linear,
// parabola_sheet, coordinate.
PDMap map_from_config(const json& spec);

GroupFile group_from_json(const json& j);

} // namespace carnot::cmd
