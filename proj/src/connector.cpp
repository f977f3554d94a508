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

#include "adaptflow/change_action.hpp"
#include "adaptflow/connector.hpp"

namespace adaptflow {

const std::vector<ConnectorType>& all_connector_types()
{
    static const std::vector<ConnectorType> types{
        ConnectorType::Simple,          ConnectorType::SeqIn,         ConnectorType::SeqOut,
        ConnectorType::SelIn,           ConnectorType::SelOut,        ConnectorType::ParIn,
        ConnectorType::ParOut,          ConnectorType::LoopIn,        ConnectorType::LoopOut,
        ConnectorType::BlockStart,      ConnectorType::BlockEnd,      ConnectorType::ParallelOut,
        ConnectorType::ParallelIn,      ConnectorType::SerialOut,     ConnectorType::SerialIn,
        ConnectorType::CompressorOut,   ConnectorType::CompressorIn,  ConnectorType::DataModifierOut,
        ConnectorType::DataModifierIn,  ConnectorType::CacheElement,  ConnectorType::Condition,
        ConnectorType::Queue,
    };
    return types;
}

std::string_view to_string(ConnectorType type)
{
    switch (type) {
    case ConnectorType::Simple: return "Simple";
    case ConnectorType::SeqIn: return "SeqIn";
    case ConnectorType::SeqOut: return "SeqOut";
    case ConnectorType::SelIn: return "SelIn";
    case ConnectorType::SelOut: return "SelOut";
    case ConnectorType::ParIn: return "ParIn";
    case ConnectorType::ParOut: return "ParOut";
    case ConnectorType::LoopIn: return "LoopIn";
    case ConnectorType::LoopOut: return "LoopOut";
    case ConnectorType::BlockStart: return "BlockStart";
    case ConnectorType::BlockEnd: return "BlockEnd";
    case ConnectorType::ParallelOut: return "ParallelOut";
    case ConnectorType::ParallelIn: return "ParallelIn";
    case ConnectorType::SerialOut: return "SerialOut";
    case ConnectorType::SerialIn: return "SerialIn";
    case ConnectorType::CompressorOut: return "CompressorOut";
    case ConnectorType::CompressorIn: return "CompressorIn";
    case ConnectorType::DataModifierOut: return "DataModifierOut";
    case ConnectorType::DataModifierIn: return "DataModifierIn";
    case ConnectorType::CacheElement: return "CacheElement";
    case ConnectorType::Condition: return "Condition";
    case ConnectorType::Queue: return "Queue";
    }
    return "?";
}

std::optional<ConnectorType> connector_type_from_string(std::string_view name)
{
    for (auto t : all_connector_types())
        if (to_string(t) == name)
            return t;
    return std::nullopt;
}

bool is_sender_side(ConnectorType type)
{
    return type == ConnectorType::CompressorOut || type == ConnectorType::DataModifierOut
           || type == ConnectorType::Queue;
}

ChangeAction ChangeAction::add_connector(std::string id, ConnectorType type, ConnectorConfig config)
{
    ChangeAction a;
    a.kind = Kind::AddConnector;
    a.id = std::move(id);
    a.con_type = type;
    a.config = std::move(config);
    return a;
}

ChangeAction ChangeAction::remove_connector(std::string id)
{
    ChangeAction a;
    a.kind = Kind::RemoveConnector;
    a.id = std::move(id);
    return a;
}

ChangeAction ChangeAction::add_binding(std::string from, std::string to)
{
    ChangeAction a;
    a.kind = Kind::AddBinding;
    a.from = std::move(from);
    a.to = std::move(to);
    return a;
}

ChangeAction ChangeAction::remove_binding(std::string from, std::string to)
{
    ChangeAction a;
    a.kind = Kind::RemoveBinding;
    a.from = std::move(from);
    a.to = std::move(to);
    return a;
}

ChangeAction ChangeAction::set_param(std::string id, std::string key, double value)
{
    ChangeAction a;
    a.kind = Kind::SetConnectorParam;
    a.id = std::move(id);
    a.key = std::move(key);
    a.value = value;
    return a;
}

ChangeAction ChangeAction::add_component(std::string id, std::string sc_type, std::string provider)
{
    ChangeAction a;
    a.kind = Kind::AddComponent;
    a.id = std::move(id);
    a.sc_type = std::move(sc_type);
    a.provider = std::move(provider);
    return a;
}

ChangeAction ChangeAction::remove_component(std::string id)
{
    ChangeAction a;
    a.kind = Kind::RemoveComponent;
    a.id = std::move(id);
    return a;
}

ChangeAction ChangeAction::for_each_in_binding(std::string sc, std::string new_target, std::vector<std::string> except)
{
    ChangeAction a;
    a.kind = Kind::ForEachInBinding;
    a.id = std::move(sc);
    a.to = std::move(new_target);
    a.except = std::move(except);
    return a;
}

ChangeAction ChangeAction::for_each_out_binding(std::string sc, std::string new_source, std::vector<std::string> except)
{
    ChangeAction a;
    a.kind = Kind::ForEachOutBinding;
    a.id = std::move(sc);
    a.from = std::move(new_source);
    a.except = std::move(except);
    return a;
}

namespace {

std::string except_text(const std::vector<std::string>& except)
{
    if (except.empty())
        return {};
    std::string s = " except {";
    for (std::size_t i = 0; i < except.size(); ++i)
        s += (i ? ", " : "") + except[i];
    return s + "}";
}

} // namespace

std::string to_string(const ChangeAction& a)
{
    using K = ChangeAction::Kind;
    switch (a.kind) {
    case K::AddConnector: return "AddConnector(" + a.id + ", " + std::string(to_string(a.con_type)) + ")";
    case K::RemoveConnector: return "RemoveConnector(" + a.id + ")";
    case K::AddBinding: return "AddBinding(" + a.from + ", " + a.to + ")";
    case K::RemoveBinding: return "RemoveBinding(" + a.from + ", " + a.to + ")";
    case K::SetConnectorParam: return "SetParam(" + a.id + ", " + a.key + ", " + nlohmann::json(a.value).dump() + ")";
    case K::AddComponent: return "AddComponent(" + a.id + ", " + a.sc_type + ", " + a.provider + ")";
    case K::RemoveComponent: return "RemoveComponent(" + a.id + ")";
    case K::ForEachInBinding: return "ForEachInBinding(" + a.id + " -> " + a.to + except_text(a.except) + ")";
    case K::ForEachOutBinding: return "ForEachOutBinding(" + a.id + " -> " + a.from + except_text(a.except) + ")";
    }
    return "?";
}

nlohmann::ordered_json to_json(const ChangeAction& a)
{
    using K = ChangeAction::Kind;
    nlohmann::ordered_json j;
    switch (a.kind) {
    case K::AddConnector: {
        j["action"] = "add_connector";
        j["id"] = a.id;
        j["type"] = to_string(a.con_type);
        if (!a.config.partner.empty())
            j["partner"] = a.config.partner;
        if (!a.config.weights.empty())
            j["weights"] = a.config.weights;
        if (!a.config.params.empty())
            j["params"] = a.config.params;
        if (!a.config.delegate.empty())
            j["delegate"] = a.config.delegate;
        break;
    }
    case K::RemoveConnector:
        j["action"] = "remove_connector";
        j["id"] = a.id;
        break;
    case K::AddBinding:
        j["action"] = "add_binding";
        j["from"] = a.from;
        j["to"] = a.to;
        break;
    case K::RemoveBinding:
        j["action"] = "remove_binding";
        j["from"] = a.from;
        j["to"] = a.to;
        break;
    case K::SetConnectorParam:
        j["action"] = "set_param";
        j["id"] = a.id;
        j["key"] = a.key;
        j["value"] = a.value;
        break;
    case K::AddComponent:
        j["action"] = "add_component";
        j["id"] = a.id;
        j["sc_type"] = a.sc_type;
        j["provider"] = a.provider;
        break;
    case K::RemoveComponent:
        j["action"] = "remove_component";
        j["id"] = a.id;
        break;
    case K::ForEachInBinding:
        j["action"] = "for_each_in_binding";
        j["id"] = a.id;
        j["to"] = a.to;
        if (!a.except.empty())
            j["except"] = a.except;
        break;
    case K::ForEachOutBinding:
        j["action"] = "for_each_out_binding";
        j["id"] = a.id;
        j["from"] = a.from;
        if (!a.except.empty())
            j["except"] = a.except;
        break;
    }
    return j;
}

} // namespace adaptflow
