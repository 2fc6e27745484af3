// Copyright 2026 The SDE Authors
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

#include "sde/protocol.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace sde {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_fail(const std::string& message) {
    throw SdeError(ErrorCode::SchemaError, message);
}

json parse_json_line(const std::string& line) {
    try {
        return json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw SdeError(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what())
            .at_byte(static_cast<std::int64_t>(e.byte));
    }
}

double finite_number(const json& j, const char* what) {
    if (!j.is_number()) schema_fail(std::string(what) + " must be a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) schema_fail(std::string(what) + " must be finite");
    return v;
}

std::string string_field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end() || !it->is_string()) {
        schema_fail(std::string("missing or non-string field \"") + name + "\"");
    }
    return it->get<std::string>();
}

// counts object keys not named in `known`
unsigned count_unknown(const json& object, const std::set<std::string>& known) {
    unsigned n = 0;
    for (const auto& [key, value] : object.items()) {
        if (!known.count(key)) ++n;
    }
    return n;
}

json scalar_to_json(const Scalar& s) {
    if (const double* d = std::get_if<double>(&s)) return *d;
    return std::get<std::string>(s);
}

Scalar scalar_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    schema_fail("scalar values must be numbers or strings");
}

std::vector<Scalar> item_from_json(const json& j) {
    std::vector<Scalar> item;
    if (j.is_array()) {
        for (const auto& e : j) item.push_back(scalar_from_json(e));
    } else {
        item.push_back(scalar_from_json(j));
    }
    if (item.empty()) schema_fail("query item must not be empty");
    return item;
}

json item_to_json(const std::vector<Scalar>& item) {
    if (item.size() == 1) return scalar_to_json(item[0]);
    json arr = json::array();
    for (const Scalar& s : item) arr.push_back(scalar_to_json(s));
    return arr;
}

// --- window -----------------------------------------------------------

json window_to_json(const WindowSpec& w) {
    json j;
    switch (w.mode) {
        case WindowMode::None: j["mode"] = "None"; return j;
        case WindowMode::TimeSliding: j["mode"] = "TimeSliding"; break;
        case WindowMode::CountSliding: j["mode"] = "CountSliding"; break;
    }
    j["length"] = w.length;
    j["slide"] = w.slide;
    if (w.allowed_lateness) j["allowedLateness"] = w.allowed_lateness;
    return j;
}

WindowSpec window_from_json(const json& j) {
    WindowSpec w;
    std::string mode = string_field(j, "mode");
    if (mode == "None") {
        w.mode = WindowMode::None;
        return w;
    }
    if (mode == "TimeSliding") {
        w.mode = WindowMode::TimeSliding;
    } else if (mode == "CountSliding") {
        w.mode = WindowMode::CountSliding;
    } else {
        schema_fail("unknown window mode \"" + mode + "\"");
    }
    w.length = static_cast<std::int64_t>(finite_number(j.at("length"), "window.length"));
    w.slide = j.contains("slide")
                  ? static_cast<std::int64_t>(finite_number(j.at("slide"), "window.slide"))
                  : w.length;
    if (j.contains("allowedLateness")) {
        w.allowed_lateness = static_cast<std::int64_t>(
            finite_number(j.at("allowedLateness"), "window.allowedLateness"));
    }
    return w;
}

// --- scope ------------------------------------------------------------

json scope_to_json(const Scope& s) {
    switch (s.type) {
        case ScopeType::WholeSource: return "WholeSource";
        case ScopeType::PerStreamOfSource: return "PerStreamOfSource";
        case ScopeType::SingleStream: {
            json j;
            j["type"] = "SingleStream";
            j["streamID"] = s.stream_id;
            return j;
        }
    }
    return "WholeSource";
}

Scope scope_from_json(const json& j) {
    if (j.is_string()) {
        std::string name = j.get<std::string>();
        if (name == "WholeSource") return Scope::whole_source();
        if (name == "PerStreamOfSource") return Scope::per_stream();
        schema_fail("unknown scope \"" + name + "\"");
    }
    if (j.is_object()) {
        std::string type = string_field(j, "type");
        if (type == "SingleStream") return Scope::single_stream(string_field(j, "streamID"));
        if (type == "WholeSource") return Scope::whole_source();
        if (type == "PerStreamOfSource") return Scope::per_stream();
        schema_fail("unknown scope type \"" + type + "\"");
    }
    schema_fail("scope must be a string or an object");
}

// --- synopsis spec ----------------------------------------------------

const std::set<std::string> kSpecFields = {
    "synopsisID", "kind",       "datasetKey", "scope",  "keyIndex", "valueIndexes",
    "param",      "parallelism", "partitioning", "window", "continuous", "federation"};

json spec_to_json(const SynopsisSpec& spec) {
    json j;
    j["synopsisID"] = spec.synopsis_id;
    j["kind"] = spec.kind_label();
    j["datasetKey"] = spec.dataset_id;
    j["scope"] = scope_to_json(spec.scope);
    j["keyIndex"] = spec.key_field;
    json idx = json::array();
    for (std::size_t v : spec.value_fields) idx.push_back(v);
    j["valueIndexes"] = idx;
    json params;
    for (const auto& [name, value] : spec.params) params[name] = value;
    j["param"] = params;
    j["parallelism"] = spec.parallelism;
    j["partitioning"] = spec.partitioning == Partitioning::KeyHash ? "KeyHash" : "RoundRobin";
    j["window"] = window_to_json(spec.window);
    j["continuous"] = spec.continuous;
    if (spec.federation) {
        json fed;
        fed["siteID"] = spec.federation->site_id;
        fed["responsibleSite"] = spec.federation->responsible_site;
        j["federation"] = fed;
    }
    return j;
}

SynopsisSpec spec_from_json(const json& j, unsigned* unknown_fields) {
    if (!j.is_object()) schema_fail("spec must be an object");
    if (unknown_fields) *unknown_fields += count_unknown(j, kSpecFields);
    SynopsisSpec spec;
    spec.synopsis_id = string_field(j, "synopsisID");
    spec.kind = kind_from_name(string_field(j, "kind"), &spec.plugin_name);
    spec.dataset_id = string_field(j, "datasetKey");
    if (j.contains("scope")) spec.scope = scope_from_json(j.at("scope"));
    if (j.contains("keyIndex")) {
        spec.key_field = static_cast<std::size_t>(finite_number(j.at("keyIndex"), "keyIndex"));
    }
    if (j.contains("valueIndexes")) {
        if (!j.at("valueIndexes").is_array()) schema_fail("valueIndexes must be an array");
        for (const auto& e : j.at("valueIndexes")) {
            spec.value_fields.push_back(static_cast<std::size_t>(finite_number(e, "valueIndexes")));
        }
    }
    if (spec.value_fields.empty()) spec.value_fields.push_back(spec.key_field);
    if (j.contains("param")) {
        if (!j.at("param").is_object()) schema_fail("param must be an object");
        for (const auto& [name, value] : j.at("param").items()) {
            spec.params[name] = finite_number(value, name.c_str());
        }
    }
    if (j.contains("parallelism")) {
        spec.parallelism =
            static_cast<std::uint32_t>(finite_number(j.at("parallelism"), "parallelism"));
    }
    if (j.contains("partitioning")) {
        std::string p = string_field(j, "partitioning");
        if (p == "KeyHash") {
            spec.partitioning = Partitioning::KeyHash;
        } else if (p == "RoundRobin") {
            spec.partitioning = Partitioning::RoundRobin;
        } else {
            schema_fail("unknown partitioning \"" + p + "\"");
        }
    }
    if (j.contains("window")) spec.window = window_from_json(j.at("window"));
    if (j.contains("continuous")) {
        if (!j.at("continuous").is_boolean()) schema_fail("continuous must be a boolean");
        spec.continuous = j.at("continuous").get<bool>();
    }
    if (j.contains("federation")) {
        const json& fed = j.at("federation");
        FederationRole role;
        role.site_id = fed.contains("siteID") ? string_field(fed, "siteID") : "";
        role.responsible_site = string_field(fed, "responsibleSite");
        spec.federation = role;
    }
    return spec;
}

// --- queries ----------------------------------------------------------

json query_to_json(const Query& q) {
    json j;
    if (const auto* f = std::get_if<FrequencyQuery>(&q)) {
        j["type"] = "frequency";
        j["item"] = item_to_json(f->item);
    } else if (const auto* m = std::get_if<MembershipQuery>(&q)) {
        j["type"] = "membership";
        j["item"] = item_to_json(m->item);
    } else if (std::holds_alternative<DistinctQuery>(q)) {
        j["type"] = "distinct";
    } else if (std::holds_alternative<SelfJoinQuery>(q)) {
        j["type"] = "selfJoin";
    } else if (const auto* qq = std::get_if<QuantileQuery>(&q)) {
        j["type"] = "quantile";
        j["phi"] = qq->phi;
    } else if (const auto* fi = std::get_if<FrequentItemsQuery>(&q)) {
        j["type"] = "frequentItems";
        j["support"] = fi->support;
    } else if (std::holds_alternative<SampleQuery>(q)) {
        j["type"] = "sample";
    } else if (std::holds_alternative<CoresetQuery>(q)) {
        j["type"] = "coreset";
    } else if (const auto* s = std::get_if<SeriesQuery>(&q)) {
        j["type"] = "series";
        j["stream"] = s->stream_id;
    } else if (const auto* sim = std::get_if<SimilarityQuery>(&q)) {
        j["type"] = "similarity";
        j["streamA"] = sim->stream_a;
        j["streamB"] = sim->stream_b;
    } else if (const auto* cp = std::get_if<CorrelatedPairsQuery>(&q)) {
        j["type"] = "correlatedPairs";
        if (cp->threshold > 0) j["threshold"] = cp->threshold;
    }
    return j;
}

Query query_from_json(const json& j) {
    if (!j.is_object()) schema_fail("query must be an object");
    std::string type = string_field(j, "type");
    if (type == "frequency") return FrequencyQuery{item_from_json(j.at("item"))};
    if (type == "membership") return MembershipQuery{item_from_json(j.at("item"))};
    if (type == "distinct") return DistinctQuery{};
    if (type == "selfJoin") return SelfJoinQuery{};
    if (type == "quantile") return QuantileQuery{finite_number(j.at("phi"), "phi")};
    if (type == "frequentItems") {
        return FrequentItemsQuery{finite_number(j.at("support"), "support")};
    }
    if (type == "sample") return SampleQuery{};
    if (type == "coreset") return CoresetQuery{};
    if (type == "series") return SeriesQuery{string_field(j, "stream")};
    if (type == "similarity") {
        return SimilarityQuery{string_field(j, "streamA"), string_field(j, "streamB")};
    }
    if (type == "correlatedPairs") {
        CorrelatedPairsQuery q;
        if (j.contains("threshold")) q.threshold = finite_number(j.at("threshold"), "threshold");
        return q;
    }
    schema_fail("unknown query type \"" + type + "\"");
}

// --- estimate values --------------------------------------------------

void require_finite(double v) {
    if (!std::isfinite(v)) {
        throw SdeError(ErrorCode::Internal, "refusing to emit a non-finite number");
    }
}

std::string signature_hex(const std::vector<std::uint64_t>& words) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(words.size() * 16);
    for (std::uint64_t w : words) {
        for (int shift = 60; shift >= 0; shift -= 4) s.push_back(digits[(w >> shift) & 0xF]);
    }
    return s;
}

std::vector<std::uint64_t> signature_from_hex(const std::string& hex) {
    std::vector<std::uint64_t> words;
    for (std::size_t i = 0; i < hex.size(); i += 16) {
        std::uint64_t w = 0;
        for (std::size_t k = i; k < std::min(i + 16, hex.size()); ++k) {
            char c = hex[k];
            int v = (c >= 'a') ? c - 'a' + 10 : c - '0';
            w = (w << 4) | static_cast<std::uint64_t>(v);
        }
        words.push_back(w);
    }
    return words;
}

json value_to_json(const EstimateValue& value) {
    json j;
    if (std::holds_alternative<std::monostate>(value)) {
        j["type"] = "none";
    } else if (const bool* b = std::get_if<bool>(&value)) {
        j["type"] = "bool";
        j["value"] = *b;
    } else if (const double* d = std::get_if<double>(&value)) {
        require_finite(*d);
        j["type"] = "scalar";
        j["value"] = *d;
    } else if (const auto* vec = std::get_if<std::vector<double>>(&value)) {
        j["type"] = "vector";
        json arr = json::array();
        for (double v : *vec) {
            require_finite(v);
            arr.push_back(v);
        }
        j["values"] = arr;
    } else if (const auto* items = std::get_if<std::vector<ItemCount>>(&value)) {
        j["type"] = "items";
        json arr = json::array();
        for (const ItemCount& ic : *items) {
            json e;
            e["item"] = ic.item;
            e["count"] = ic.count;
            arr.push_back(e);
        }
        j["items"] = arr;
    } else if (const auto* sample = std::get_if<std::vector<Scalar>>(&value)) {
        j["type"] = "sample";
        json arr = json::array();
        for (const Scalar& s : *sample) arr.push_back(scalar_to_json(s));
        j["values"] = arr;
    } else if (const auto* points = std::get_if<std::vector<WeightedPoint>>(&value)) {
        j["type"] = "weightedPoints";
        json arr = json::array();
        for (const WeightedPoint& p : *points) {
            json e;
            json coords = json::array();
            for (double c : p.coords) {
                require_finite(c);
                coords.push_back(c);
            }
            e["coords"] = coords;
            e["weight"] = p.weight;
            arr.push_back(e);
        }
        j["points"] = arr;
    } else if (const auto* series = std::get_if<SeriesSummary>(&value)) {
        j["type"] = "series";
        if (!series->coefficients.empty()) {
            // complex coefficients as [re, im] pairs
            json arr = json::array();
            for (const auto& c : series->coefficients) {
                require_finite(c.real());
                require_finite(c.imag());
                arr.push_back(json::array({c.real(), c.imag()}));
            }
            j["coefficients"] = arr;
        }
        if (!series->signature.empty()) j["signature"] = signature_hex(series->signature);
        j["bucket"] = series->bucket;
    } else if (const auto* pairs = std::get_if<std::vector<PairScore>>(&value)) {
        j["type"] = "pairs";
        json arr = json::array();
        for (const PairScore& p : *pairs) {
            require_finite(p.score);
            json e;
            e["a"] = p.a;
            e["b"] = p.b;
            e["score"] = p.score;
            arr.push_back(e);
        }
        j["pairs"] = arr;
    }
    return j;
}

EstimateValue value_from_json(const json& j) {
    std::string type = string_field(j, "type");
    if (type == "none") return std::monostate{};
    if (type == "bool") return j.at("value").get<bool>();
    if (type == "scalar") return j.at("value").get<double>();
    if (type == "vector") {
        std::vector<double> values;
        for (const auto& e : j.at("values")) values.push_back(e.get<double>());
        return values;
    }
    if (type == "items") {
        std::vector<ItemCount> items;
        for (const auto& e : j.at("items")) {
            items.push_back({e.at("item").get<std::string>(), e.at("count").get<double>()});
        }
        return items;
    }
    if (type == "sample") {
        std::vector<Scalar> values;
        for (const auto& e : j.at("values")) values.push_back(scalar_from_json(e));
        return values;
    }
    if (type == "weightedPoints") {
        std::vector<WeightedPoint> points;
        for (const auto& e : j.at("points")) {
            WeightedPoint p;
            for (const auto& c : e.at("coords")) p.coords.push_back(c.get<double>());
            p.weight = e.at("weight").get<double>();
            points.push_back(std::move(p));
        }
        return points;
    }
    if (type == "series") {
        SeriesSummary s;
        if (j.contains("coefficients")) {
            for (const auto& e : j.at("coefficients")) {
                s.coefficients.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
            }
        }
        if (j.contains("signature")) {
            s.signature = signature_from_hex(j.at("signature").get<std::string>());
        }
        s.bucket = j.value("bucket", "");
        return s;
    }
    if (type == "pairs") {
        std::vector<PairScore> pairs;
        for (const auto& e : j.at("pairs")) {
            pairs.push_back({e.at("a").get<std::string>(), e.at("b").get<std::string>(),
                             e.at("score").get<double>()});
        }
        return pairs;
    }
    schema_fail("unknown value type \"" + type + "\"");
}

const std::set<std::string> kRequestFields = {"v",     "request_id", "verb",      "target",
                                              "stream", "spec",      "query",     "forwarded"};

}  // namespace

const char* verb_name(Verb verb) noexcept {
    switch (verb) {
        case Verb::Build: return "Build";
        case Verb::Stop: return "Stop";
        case Verb::Load: return "Load";
        case Verb::AdHocQuery: return "AdHocQuery";
        case Verb::Status: return "Status";
    }
    return "Status";
}

Request parse_request(const std::string& line, unsigned* unknown_fields) {
    json j = parse_json_line(line);
    if (!j.is_object()) schema_fail("request must be a JSON object");
    if (unknown_fields) *unknown_fields += count_unknown(j, kRequestFields);

    Request req;
    if (j.contains("v")) req.version = static_cast<int>(finite_number(j.at("v"), "v"));
    if (req.version != kProtocolVersion) {
        schema_fail("unsupported protocol version " + std::to_string(req.version));
    }
    if (!j.contains("verb")) schema_fail("missing verb");
    std::string verb = string_field(j, "verb");
    if (verb == "Build") {
        req.verb = Verb::Build;
    } else if (verb == "Stop") {
        req.verb = Verb::Stop;
    } else if (verb == "Load") {
        req.verb = Verb::Load;
    } else if (verb == "AdHocQuery") {
        req.verb = Verb::AdHocQuery;
    } else if (verb == "Status") {
        req.verb = Verb::Status;
    } else {
        schema_fail("unknown verb \"" + verb + "\"");
    }
    req.request_id = string_field(j, "request_id");
    if (req.request_id.empty()) schema_fail("request_id must not be empty");
    if (j.contains("target")) req.target = string_field(j, "target");
    if (j.contains("stream")) req.stream = string_field(j, "stream");
    if (j.contains("spec")) req.spec = spec_from_json(j.at("spec"), unknown_fields);
    if (j.contains("query")) req.query = query_from_json(j.at("query"));
    if (j.contains("forwarded")) req.forwarded = j.at("forwarded").get<bool>();

    switch (req.verb) {
        case Verb::Build:
            if (!req.spec) schema_fail("Build requires a spec");
            break;
        case Verb::Stop:
            if (req.target.empty()) schema_fail("Stop requires a target");
            break;
        case Verb::Load:
            if (req.target.empty()) schema_fail("Load requires a target (plugin name)");
            break;
        case Verb::AdHocQuery:
            if (req.target.empty()) schema_fail("AdHocQuery requires a target");
            if (!req.query) schema_fail("AdHocQuery requires a query");
            break;
        case Verb::Status:
            break;
    }
    return req;
}

std::string format_request(const Request& request) {
    json j;
    j["v"] = request.version;
    j["request_id"] = request.request_id;
    j["verb"] = verb_name(request.verb);
    if (!request.target.empty()) j["target"] = request.target;
    if (!request.stream.empty()) j["stream"] = request.stream;
    if (request.spec) j["spec"] = spec_to_json(*request.spec);
    if (request.query) j["query"] = query_to_json(*request.query);
    if (request.forwarded) j["forwarded"] = true;
    return j.dump();
}

std::string format_response(const Response& response) {
    json j;
    j["v"] = response.version;
    j["response_id"] = response.response_id;
    j["request_id"] = response.request_id;
    if (!response.synopsis_id.empty()) j["synopsisID"] = response.synopsis_id;
    if (!response.params_echo.empty()) {
        json params;
        for (const auto& [name, value] : response.params_echo) params[name] = value;
        j["param"] = params;
    }
    j["status"] = response.status;
    j["value"] = value_to_json(response.value);
    if (!response.site_id.empty()) j["siteID"] = response.site_id;
    if (response.error) {
        json err;
        err["code"] = error_code_name(response.error->code);
        err["message"] = response.error->message;
        if (response.error->byte_offset >= 0) err["byteOffset"] = response.error->byte_offset;
        j["error"] = err;
    }
    if (response.sequence) j["seq"] = *response.sequence;
    if (!response.stream_id.empty()) j["stream"] = response.stream_id;
    return j.dump();
}

Response parse_response(const std::string& line) {
    json j = parse_json_line(line);
    Response r;
    r.version = static_cast<int>(finite_number(j.at("v"), "v"));
    r.response_id = string_field(j, "response_id");
    r.request_id = string_field(j, "request_id");
    if (j.contains("synopsisID")) r.synopsis_id = string_field(j, "synopsisID");
    if (j.contains("param")) {
        for (const auto& [name, value] : j.at("param").items()) {
            r.params_echo[name] = value.get<double>();
        }
    }
    r.status = string_field(j, "status");
    if (j.contains("value")) r.value = value_from_json(j.at("value"));
    if (j.contains("siteID")) r.site_id = string_field(j, "siteID");
    if (j.contains("error")) {
        const json& err = j.at("error");
        ResponseError e;
        e.message = err.value("message", "");
        e.byte_offset = err.value("byteOffset", -1);
        std::string code = err.value("code", "internal_error");
        e.code = ErrorCode::Internal;
        for (int c = 0; c <= static_cast<int>(ErrorCode::Internal); ++c) {
            if (code == error_code_name(static_cast<ErrorCode>(c))) {
                e.code = static_cast<ErrorCode>(c);
                break;
            }
        }
        r.error = e;
    }
    if (j.contains("seq")) r.sequence = j.at("seq").get<std::uint64_t>();
    if (j.contains("stream")) r.stream_id = string_field(j, "stream");
    return r;
}

Response error_response(std::string request_id, const SdeError& error, std::string site) {
    Response r;
    r.request_id = std::move(request_id);
    r.site_id = std::move(site);
    r.status = "error";
    ResponseError e;
    e.code = error.code();
    e.message = error.what();
    e.byte_offset = error.byte_offset();
    r.error = e;
    return r;
}

std::string format_status_report(const StatusReport& report, const std::string& response_id,
                                 const std::string& request_id) {
    json j;
    j["v"] = kProtocolVersion;
    j["response_id"] = response_id;
    j["request_id"] = request_id;
    j["status"] = "ok";
    json value;
    value["type"] = "status";
    value["siteID"] = report.site_id;
    json entries = json::array();
    for (const StatusEntry& e : report.entries) {
        json entry;
        entry["synopsisID"] = e.synopsis_id;
        entry["kind"] = e.kind;
        json params;
        for (const auto& [name, v] : e.params) params[name] = v;
        entry["param"] = params;
        entry["scope"] = scope_to_json(e.scope);
        entry["parallelism"] = e.parallelism;
        entry["continuous"] = e.continuous;
        entry["federated"] = e.federated;
        entry["itemsSeen"] = e.items_seen;
        entry["shards"] = e.shard_count;
        entries.push_back(entry);
    }
    value["synopses"] = entries;
    json counters;
    counters["ingested"] = report.counters.records_ingested;
    counters["droppedNoRoute"] = report.counters.records_dropped_no_route;
    counters["droppedLate"] = report.counters.records_dropped_late;
    counters["rejected"] = report.counters.records_rejected;
    counters["requestWarnings"] = report.counters.request_warnings;
    value["counters"] = counters;
    j["value"] = value;
    return j.dump();
}

StatusReport parse_status_report(const std::string& response_line) {
    json j = parse_json_line(response_line);
    const json& value = j.at("value");
    StatusReport report;
    report.site_id = value.value("siteID", "");
    for (const auto& entry : value.at("synopses")) {
        StatusEntry e;
        e.synopsis_id = entry.at("synopsisID").get<std::string>();
        e.kind = entry.at("kind").get<std::string>();
        if (entry.contains("param")) {
            for (const auto& [name, v] : entry.at("param").items()) {
                e.params[name] = v.get<double>();
            }
        }
        e.scope = scope_from_json(entry.at("scope"));
        e.parallelism = entry.at("parallelism").get<std::uint32_t>();
        e.continuous = entry.at("continuous").get<bool>();
        e.federated = entry.at("federated").get<bool>();
        e.items_seen = entry.at("itemsSeen").get<std::uint64_t>();
        e.shard_count = entry.at("shards").get<std::uint32_t>();
        report.entries.push_back(std::move(e));
    }
    if (value.contains("counters")) {
        const json& c = value.at("counters");
        report.counters.records_ingested = c.value("ingested", 0ULL);
        report.counters.records_dropped_no_route = c.value("droppedNoRoute", 0ULL);
        report.counters.records_dropped_late = c.value("droppedLate", 0ULL);
        report.counters.records_rejected = c.value("rejected", 0ULL);
        report.counters.request_warnings = c.value("requestWarnings", 0ULL);
    }
    return report;
}

StreamRecord parse_record(const std::string& line) {
    json j = parse_json_line(line);
    if (!j.is_object()) schema_fail("record must be a JSON object");
    StreamRecord rec;
    rec.dataset_id = string_field(j, "dataset");
    if (j.contains("stream")) rec.stream_id = string_field(j, "stream");
    rec.event_time_ms = static_cast<std::int64_t>(finite_number(j.at("ts"), "ts"));
    if (!j.contains("values") || !j.at("values").is_array()) {
        schema_fail("record requires a values array");
    }
    for (const auto& e : j.at("values")) rec.values.push_back(scalar_from_json(e));
    rec.validate(/*allow_empty_stream=*/true);
    return rec;
}

std::string format_record(const StreamRecord& record) {
    json j;
    j["dataset"] = record.dataset_id;
    if (!record.stream_id.empty()) j["stream"] = record.stream_id;
    j["ts"] = record.event_time_ms;
    json values = json::array();
    for (const Scalar& s : record.values) values.push_back(scalar_to_json(s));
    j["values"] = values;
    return j.dump();
}

}  // namespace sde
