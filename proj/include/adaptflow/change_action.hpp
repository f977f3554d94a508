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

#ifndef ADAPTFLOW_CHANGE_ACTION_HPP
#define ADAPTFLOW_CHANGE_ACTION_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "adaptflow/connector.hpp"

namespace adaptflow {

/*
    Reconfiguration primitives. A batch of these is the unit of adaptation:
    the context store, the runtime model and the simulator each enact the
    same batch, all-or-nothing.

    Binding order matters for positional connectors (SelOut, SerialOut, ...):
    AddBinding appends to the source's outbound list, ForEachInBinding
    rewrites the target in place, ForEachOutBinding moves the binding to the
    new source and appends it there.
 */
struct ChangeAction
{
    enum class Kind {
        AddConnector,
        RemoveConnector,
        AddBinding,
        RemoveBinding,
        SetConnectorParam,
        AddComponent,
        RemoveComponent,
        ForEachInBinding,  // every bind(X, id) becomes bind(X, to)
        ForEachOutBinding, // every bind(id, Y) becomes bind(from, Y)
    };

    Kind kind = Kind::AddBinding;
    std::string id;
    std::string from;
    std::string to;
    ConnectorType con_type = ConnectorType::Simple;
    ConnectorConfig config;
    std::string sc_type;
    std::string provider;
    std::string key;
    double value = 0.0;
    // ForEach*: bindings whose other endpoint is listed here are left alone.
    std::vector<std::string> except;

    static ChangeAction add_connector(std::string id, ConnectorType type, ConnectorConfig config = {});
    static ChangeAction remove_connector(std::string id);
    static ChangeAction add_binding(std::string from, std::string to);
    static ChangeAction remove_binding(std::string from, std::string to);
    static ChangeAction set_param(std::string id, std::string key, double value);
    static ChangeAction add_component(std::string id, std::string sc_type, std::string provider);
    static ChangeAction remove_component(std::string id);
    static ChangeAction for_each_in_binding(std::string sc, std::string new_target, std::vector<std::string> except = {});
    static ChangeAction for_each_out_binding(std::string sc, std::string new_source, std::vector<std::string> except = {});

    bool operator==(const ChangeAction&) const = default;
};

std::string to_string(const ChangeAction& action);
nlohmann::ordered_json to_json(const ChangeAction& action);

} // namespace adaptflow

#endif // ADAPTFLOW_CHANGE_ACTION_HPP
