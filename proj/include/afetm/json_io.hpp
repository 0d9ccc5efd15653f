// Copyright 2026 The AFETM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON file formats of every data type. Object keys are emitted sorted, so
// equal values serialize to equal bytes.

#ifndef AFETM_JSON_IO_HPP_
#define AFETM_JSON_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afetm/calltree.hpp"
#include "afetm/diagnoser.hpp"
#include "afetm/fault.hpp"
#include "afetm/harness.hpp"
#include "afetm/injector.hpp"
#include "afetm/progmodel.hpp"
#include "afetm/selector.hpp"
#include "json.hpp"

namespace afetm {

using Json = nlohmann::json;

// Throws ParseError with line and column on malformed input, Error when the
// file cannot be opened.
Json read_json_file(const std::filesystem::path& path);
Json parse_json(std::string_view text, std::string_view source = "<input>");
// Two-space indentation, trailing newline.
std::string dump_json(const Json& j);
void write_text_file(const std::filesystem::path& path, std::string_view text);
void write_json_file(const std::filesystem::path& path, const Json& j);

// Rejects keys outside `allowed`, naming the offending key and `context`.
void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                std::string_view context);

// CallTree: one object for a single root, an array for a forest.
Json to_json(const CallTree& tree);
CallTree call_tree_from_json(const Json& j);
Json to_json(std::span<const CallTree> trees);
std::vector<CallTree> call_trees_from_json(const Json& j);

Json to_json(const TraceEvent& e);
TraceEvent trace_event_from_json(const Json& j);
std::vector<TraceEvent> read_events_ndjson(std::istream& in);
void write_events_ndjson(std::ostream& out, std::span<const TraceEvent> events);

Json to_json(const TracePlan& plan);
TracePlan trace_plan_from_json(const Json& j);

Json to_json(const ProgramSpec& spec);
ProgramSpec program_spec_from_json(const Json& j);

Json to_json(const CoverageInstance& instance);
CoverageInstance coverage_instance_from_json(const Json& j);
Json to_json(const SelectionSolution& s, const CoverageInstance& instance);

Json to_json(const MmasParams& p);
// Overrides fields present in j.
void update_from_json(MmasParams& p, const Json& j);

Json to_json(const FaultSpec& f);
FaultSpec fault_spec_from_json(const Json& j);

Json to_json(const ScheduledRequest& r);
ScheduledRequest scheduled_request_from_json(const Json& j);

Json to_json(const Fddb& fddb);
Fddb fddb_from_json(const Json& j);

Json to_json(const TrainingConfig& c);
void update_from_json(TrainingConfig& c, const Json& j);

// The model path is resolved against `base_dir` when relative.
Json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_config_from_json(const Json& j,
                                             const std::filesystem::path& base_dir);

}  // namespace afetm

#endif  // AFETM_JSON_IO_HPP_
