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

#ifndef ADAPTFLOW_TRACE_HPP
#define ADAPTFLOW_TRACE_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace adaptflow {

/// Event kinds of the line-delimited trace.
const std::vector<std::string>& trace_kinds();

/*
    Trace sink. Each event is one JSON object {"t": ms, "kind": ..., ...}
    written as a single line. Events may also be retained in memory for
    inspection by tests and the report.
 */
class TraceWriter
{
public:
    TraceWriter() = default;
    explicit TraceWriter(std::ostream* out, bool retain = false) : out_(out), retain_(retain) { }

    void emit(std::int64_t t, std::string_view kind, nlohmann::ordered_json fields = nlohmann::ordered_json::object());

    const std::vector<nlohmann::ordered_json>& events() const { return events_; }
    std::size_t count(std::string_view kind) const;
    void set_retain(bool retain) { retain_ = retain; }
    void set_kind_filter(std::vector<std::string> kinds) { filter_ = std::move(kinds); }

private:
    std::ostream* out_ = nullptr;
    bool retain_ = true;
    std::vector<std::string> filter_;
    std::vector<nlohmann::ordered_json> events_;
    std::int64_t last_t_ = 0;
};

/// Checks one trace line against the documented event schema; returns an
/// empty string when valid, otherwise the reason.
std::string check_trace_event(const nlohmann::json& event);

} // namespace adaptflow

#endif // ADAPTFLOW_TRACE_HPP
