#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "qpwalk/oracle.hpp"
#include "qpwalk/queueing.hpp"

namespace qpwalk {

/// A model file either describes a nearest-neighbor walk (four kernels or a
/// builder shorthand) or the geometric-batch model, which is not a WalkSpec.
using ModelSource = std::variant<WalkSpec<Rat>, BatchGeometricParams<Rat>>;

/// Parses a model from a JSON document string.
ModelSource parse_model(const std::string& json_text);

/// Loads a model file; `source` may also be an inline builder shorthand of
/// the form "name:key=value,key=value".
ModelSource load_model(const std::string& source);

/// Loads a model file that must be a walk spec (ParseError otherwise).
WalkSpec<Rat> load_spec(const std::string& path);

void save_spec(const WalkSpec<Rat>& spec, const std::string& path);
std::string spec_to_json(const WalkSpec<Rat>& spec);

// CSV / text exports
void write_curves_csv(std::ostream& os, const std::vector<CurvePoint>& points);
void write_measure_csv(std::ostream& os, const InvariantMeasure<Rat>& measure, long window);
void write_measure_csv(std::ostream& os, const InvariantMeasure<double>& measure, long window);
void write_grid_csv(std::ostream& os, const OracleGrid<Rat>& grid);
void write_grid_csv(std::ostream& os, const OracleGrid<double>& grid);
std::string measure_text(const InvariantMeasure<Rat>& measure);
std::string measure_text(const InvariantMeasure<double>& measure);

}  // namespace qpwalk
