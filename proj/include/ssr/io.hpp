#pragma once

#include <string>

#include <json.hpp>

#include "ssr/pipeline.hpp"

namespace ssr {

// {"n": 4, "p": 3, "f": ...} where f is a coefficient list (constant term first), a polynomial
// string, or a factored list [["x^2-3", 1], ...].
SuperellipticCurve parse_curve_json(const nlohmann::json& j);
SuperellipticCurve load_curve(const std::string& path);

// {"f": 2, "residue_modulus": [...], "steps": [step, ...]} where each step lists the coefficients of its
// polynomial (constant term first), each coefficient lists its digits in powers of the previous
// uniformizer, and each digit lists f integers (powers of the unramified generator).
FieldTower parse_tower_json(const nlohmann::json& j);
FieldTower load_tower(const std::string& path);

nlohmann::ordered_json json_report(const PipelineResult& R);
std::string text_report(const PipelineResult& R);

std::string intpoly_to_string(const IntPoly& P, const std::string& var = "T");

}  // namespace ssr
