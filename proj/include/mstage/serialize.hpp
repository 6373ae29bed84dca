#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "mstage/estimators.hpp"
#include "mstage/model.hpp"
#include "mstage/two_stage.hpp"

namespace mstage {

using json = nlohmann::json;

// Malformed configuration; the message names the offending JSON path.
// The CLI maps this to exit code 1.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unknown fields are rejected; `path` is the JSON pointer used in messages.
void require_known_keys(const json& j, std::initializer_list<const char*> allowed,
                        const std::string& path);

json to_json(const CurveSpec& c);
json to_json(const ModelSpec& m);
json to_json(const DesignSpec& d);
json to_json(const TwoStageConfig& c);
json to_json(const StepFunction& f);

// Parsers apply present fields over the given base so problem defaults can
// be echoed back.
CurveSpec curve_from_json(const json& j, const std::string& path, CurveSpec base = {});
ModelSpec model_from_json(const json& j, const std::string& path, ModelSpec base = {});
DesignSpec design_from_json(const json& j, const std::string& path, DesignSpec base = {});
TwoStageConfig two_stage_from_json(const json& j, const std::string& path,
                                   TwoStageConfig base = {});
StepFunction step_from_json(const json& j, const std::string& path);

std::string problem_name(Problem p);
Problem problem_from_name(const std::string& s, const std::string& path);

}  // namespace mstage
