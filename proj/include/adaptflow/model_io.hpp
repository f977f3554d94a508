/*
 * Copyright 2026 The AdaptFlow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ADAPTFLOW_MODEL_IO_HPP
#define ADAPTFLOW_MODEL_IO_HPP

#include <string>
#include <string_view>
#include <vector>

#include "adaptflow/model.hpp"

namespace adaptflow {

class TacticLibrary;

/// Parses and validates a model document. Throws SyntaxError or ValidationError.
AdaptiveProcessModel parse_model(std::string_view text);
AdaptiveProcessModel parse_model(std::string_view text, const TacticLibrary& tactics);

AdaptiveProcessModel load_model_file(const std::string& path);

/// Canonical document: fixed key order, two-space indentation, trailing newline.
std::string serialize_model(const AdaptiveProcessModel& model);

/// Checks every model invariant; throws ValidationError naming the first offender.
void validate_model(const AdaptiveProcessModel& model, const TacticLibrary& tactics);

/// The unique node carrying `label`; "root" always names the whole workflow.
const ProcessNode& resolve_label(const AdaptiveProcessModel& model, std::string_view label);

/// Every property declared by the model, inline aggregation bases included,
/// each paired with the label of the block it measures.
struct DeclaredProperty
{
    const PropertySpec* spec;
    std::string target;
};

std::vector<DeclaredProperty> declared_properties(const AdaptiveProcessModel& model);

/// Assumption names mentioned anywhere in plans or the scenario.
std::vector<std::string> declared_assumptions(const AdaptiveProcessModel& model);

/// Message fields a Data or Constraint property may read.
const std::vector<std::string>& message_fields();

} // namespace adaptflow

#endif // ADAPTFLOW_MODEL_IO_HPP
