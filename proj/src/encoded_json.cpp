#include "sparsespace/encoded_json.hpp"

#include <json.hpp>

#include "sparsespace/error.hpp"

namespace sparsespace {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kFormat = "sparsespace.encoded/1";

[[noreturn]] void schema_error(const std::string& msg) { throw Error(ErrorCode::SchemaError, msg); }

Dim dim_from(const Json& j, const char* what) {
    if (!j.is_string()) schema_error(std::string(what) + " must be a string");
    const auto s = j.get<std::string>();
    if (s == "rows") return Dim::Rows;
    if (s == "columns") return Dim::Columns;
    if (s == "blocks") return Dim::Blocks;
    schema_error(std::string(what) + ": unknown dimension '" + s + "'");
}

const Json& field(const Json& obj, const char* key) {
    if (!obj.is_object()) schema_error(std::string("expected an object holding '") + key + "'");
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(std::string("missing field '") + key + "'");
    return *it;
}

std::size_t as_count(const Json& j, const char* what) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        schema_error(std::string(what) + " must be a non-negative integer");
    }
    return j.get<std::size_t>();
}

std::string as_string(const Json& j, const char* what) {
    if (!j.is_string()) schema_error(std::string(what) + " must be a string");
    return j.get<std::string>();
}

Json step_json(const TransformStep& step) {
    return std::visit(
        [](const auto& s) -> Json {
            using T = std::decay_t<decltype(s)>;
            Json j;
            if constexpr (std::is_same_v<T, PackStep>) {
                j["op"] = "pack";
                j["dim"] = to_string(s.dim);
                j["index"] = s.index_name;
                j["length"] = s.length_name ? Json(*s.length_name) : Json(nullptr);
            } else if constexpr (std::is_same_v<T, BlockStep>) {
                j["op"] = "block";
                j["dim"] = to_string(s.dim);
                j["factor"] = s.factor;
                j["padding"] = "zero";
                j["count"] = s.count_name;
            } else {
                j["op"] = "schedule";
                j["dim"] = to_string(s.dim);
                j["machines"] = s.machines;
                j["policy"] = "asap";
                j["padding"] = "zero";
            }
            return j;
        },
        step);
}

Json spec_json(const RepresentationSpec& spec) {
    Json j;
    j["name"] = spec.name;
    j["steps"] = Json::array();
    for (const auto& s : spec.steps) j["steps"].push_back(step_json(s));
    return j;
}

void expect_literal(const Json& obj, const char* key, const char* value) {
    if (as_string(field(obj, key), key) != value) {
        schema_error(std::string(key) + " must be '" + value + "'");
    }
}

RepresentationSpec spec_from(const Json& j) {
    RepresentationSpec spec;
    spec.name = as_string(field(j, "name"), "spec.name");
    const Json& steps = field(j, "steps");
    if (!steps.is_array()) schema_error("spec.steps must be an array");
    for (const auto& s : steps) {
        const auto op = as_string(field(s, "op"), "step.op");
        if (op == "pack") {
            PackStep p;
            p.dim = dim_from(field(s, "dim"), "pack.dim");
            p.index_name = as_string(field(s, "index"), "pack.index");
            const Json& len = field(s, "length");
            if (len.is_null()) {
                p.length_name.reset();
            } else {
                p.length_name = as_string(len, "pack.length");
            }
            spec.steps.emplace_back(p);
        } else if (op == "block") {
            BlockStep b;
            b.dim = dim_from(field(s, "dim"), "block.dim");
            b.factor = as_count(field(s, "factor"), "block.factor");
            expect_literal(s, "padding", "zero");
            b.count_name = as_string(field(s, "count"), "block.count");
            spec.steps.emplace_back(b);
        } else if (op == "schedule") {
            ScheduleStep sc;
            sc.dim = dim_from(field(s, "dim"), "schedule.dim");
            sc.machines = as_count(field(s, "machines"), "schedule.machines");
            expect_literal(s, "policy", "asap");
            expect_literal(s, "padding", "zero");
            spec.steps.emplace_back(sc);
        } else {
            schema_error("unknown step op '" + op + "'");
        }
    }
    return spec;
}

template <typename T, typename Conv>
std::vector<std::vector<T>> streams_from(const Json& j, const char* what, std::size_t m, std::size_t len, Conv conv) {
    if (!j.is_array() || j.size() != m) {
        schema_error(std::string(what) + " must hold " + std::to_string(m) + " streams");
    }
    std::vector<std::vector<T>> out(m);
    for (std::size_t k = 0; k < m; ++k) {
        const Json& s = j[k];
        if (!s.is_array() || s.size() != len) {
            schema_error(std::string(what) + "[" + std::to_string(k) + "] must hold " + std::to_string(len) +
                         " entries");
        }
        out[k].reserve(len);
        for (const auto& v : s) out[k].push_back(conv(v));
    }
    return out;
}

}  // namespace

std::string spec_to_json(const RepresentationSpec& spec) { return spec_json(spec).dump(); }

RepresentationSpec spec_from_json(std::string_view text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) schema_error("spec is not valid JSON");
    return spec_from(j);
}

std::string encoded_to_json(const EncodedMatrix& e, int indent) {
    Json j;
    j["format"] = kFormat;
    j["spec"] = spec_json(e.spec);
    j["origin_dims"] = {e.n_rows, e.n_cols};
    j["machines"] = e.machines;
    j["stream_length"] = e.stream_length;
    j["values"] = e.values;
    j["col_idx"] = e.col_idx;

    Json structure;
    if (const auto* rl = std::get_if<RowLengths>(&e.structure)) {
        structure["kind"] = "row_len";
        structure["row_len"] = rl->per_machine;
    } else {
        const auto& rb = std::get<RowBlocks>(e.structure);
        structure["kind"] = "row_blocks";
        structure["row_blocks"] = rb.counts;
        structure["factor"] = rb.factor;
    }
    j["structure"] = std::move(structure);

    Json prov = Json::array();
    for (const auto& stream : e.provenance) {
        Json s = Json::array();
        for (const auto& o : stream) s.push_back(o ? Json{o->row, o->col} : Json(nullptr));
        prov.push_back(std::move(s));
    }
    j["provenance"] = std::move(prov);
    return j.dump(indent);
}

EncodedMatrix encoded_from_json(std::string_view text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) schema_error("not valid JSON");
    if (as_string(field(j, "format"), "format") != kFormat) {
        schema_error(std::string("format must be '") + kFormat + "'");
    }

    EncodedMatrix e;
    e.spec = spec_from(field(j, "spec"));
    const Json& dims = field(j, "origin_dims");
    if (!dims.is_array() || dims.size() != 2) schema_error("origin_dims must be [n_rows, n_cols]");
    e.n_rows = as_count(dims[0], "origin_dims[0]");
    e.n_cols = as_count(dims[1], "origin_dims[1]");
    e.machines = as_count(field(j, "machines"), "machines");
    e.stream_length = as_count(field(j, "stream_length"), "stream_length");
    const std::size_t m = e.machines;
    const std::size_t len = e.stream_length;

    e.values = streams_from<double>(field(j, "values"), "values", m, len, [](const Json& v) {
        if (!v.is_number()) schema_error("values entries must be numbers");
        return v.get<double>();
    });
    e.col_idx = streams_from<std::size_t>(field(j, "col_idx"), "col_idx", m, len,
                                          [](const Json& v) { return as_count(v, "col_idx entry"); });

    const Json& st = field(j, "structure");
    const auto kind = as_string(field(st, "kind"), "structure.kind");
    if (kind == "row_len") {
        const Json& rl = field(st, "row_len");
        if (!rl.is_array() || rl.size() != m) schema_error("structure.row_len must hold one list per machine");
        RowLengths lengths;
        for (const auto& per : rl) {
            if (!per.is_array()) schema_error("structure.row_len entries must be arrays");
            std::vector<std::size_t> v;
            for (const auto& x : per) v.push_back(as_count(x, "row_len entry"));
            lengths.per_machine.push_back(std::move(v));
        }
        e.structure = std::move(lengths);
    } else if (kind == "row_blocks") {
        const Json& rb = field(st, "row_blocks");
        if (!rb.is_array()) schema_error("structure.row_blocks must be an array");
        RowBlocks blocks;
        for (const auto& x : rb) blocks.counts.push_back(as_count(x, "row_blocks entry"));
        blocks.factor = as_count(field(st, "factor"), "structure.factor");
        e.structure = std::move(blocks);
    } else {
        schema_error("unknown structure kind '" + kind + "'");
    }

    e.provenance = streams_from<SlotOrigin>(field(j, "provenance"), "provenance", m, len, [](const Json& v) {
        if (v.is_null()) return SlotOrigin{};
        if (!v.is_array() || v.size() != 2) schema_error("provenance entries must be [i, j] or null");
        return SlotOrigin{Coord{as_count(v[0], "provenance row"), as_count(v[1], "provenance col")}};
    });
    return e;
}

}  // namespace sparsespace
