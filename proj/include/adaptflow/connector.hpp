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

#ifndef ADAPTFLOW_CONNECTOR_HPP
#define ADAPTFLOW_CONNECTOR_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adaptflow {

/*
    Connector kinds. Structural kinds come out of the workflow transform;
    the rest are installed by adaptation tactics.

    Naming: *Out fans out into a region, *In collects from it, except for
    the sequence pair where SeqIn receives from the predecessor and SeqOut
    delivers to the successor.
 */
enum class ConnectorType {
    Simple,
    SeqIn,
    SeqOut,
    SelIn,       // merge after a selection
    SelOut,      // weighted choice of one outbound binding
    ParIn,       // and_par join, waits for every branch
    ParOut,      // and_par fork
    LoopIn,
    LoopOut,     // outbound[0] is the back edge
    BlockStart,
    BlockEnd,
    ParallelOut, // tactic fork
    ParallelIn,  // tactic join, first successful response wins
    SerialOut,   // outbound[0] primary, outbound[1] fallback
    SerialIn,
    CompressorOut,
    CompressorIn,
    DataModifierOut,
    DataModifierIn,
    CacheElement, // outbound[0] the cached service, outbound[1] the bypass
    Condition,    // outbound[0] re-invokes, outbound[1] continues
    Queue,
};

std::string_view to_string(ConnectorType type);
std::optional<ConnectorType> connector_type_from_string(std::string_view name);
const std::vector<ConnectorType>& all_connector_types();

/// Connectors that process a message on the sending side of a link; the
/// link transit is charged after them rather than before.
bool is_sender_side(ConnectorType type);

/// Kind-specific connector settings.
struct ConnectorConfig
{
    // Paired connector: fork<->join, BlockStart<->BlockEnd, SerialIn->SerialOut.
    std::string partner;
    // SelOut branch weights, positional over outbound bindings.
    std::vector<double> weights;
    // Numeric parameters: iterations, ratio, cpu_ms, battery_per_message,
    // memory_per_message, hit_ratio, cap, scale.
    std::map<std::string, double> params;
    // Named delegate (payload function, cache filter, retry condition).
    std::string delegate;

    double param(const std::string& key, double fallback) const
    {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }

    bool operator==(const ConnectorConfig&) const = default;
};

} // namespace adaptflow

#endif // ADAPTFLOW_CONNECTOR_HPP
