#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparsespace/sparsespace.hpp"

namespace py = pybind11;
using namespace sparsespace;

namespace {

DenseMatrix to_dense(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw Error(ErrorCode::DimensionMismatch, "matrix must be two-dimensional");
    const auto rows = static_cast<std::size_t>(a.shape(0)), cols = static_cast<std::size_t>(a.shape(1));
    return DenseMatrix(rows, cols, std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> to_array(const DenseMatrix& a) {
    py::array_t<double> out({a.rows(), a.cols()});
    std::copy(a.values().begin(), a.values().end(), out.mutable_data());
    return out;
}

DesignDescriptor descriptor(const std::string& design, std::optional<std::size_t> machines,
                            std::optional<std::size_t> adders, std::optional<std::size_t> k,
                            std::optional<std::size_t> levels) {
    return {design, machines, adders, k, levels};
}

}  // namespace

PYBIND11_MODULE(_sparsespace, mod) {
    mod.doc() = "Sparse-matrix stream encodings and simulated SpMV pipelines";

    // The module keeps the type alive; instances carry the error code name.
    static py::handle error_type = py::exception<Error>(mod, "Error").release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst = error_type(py::str(e.what()));
            inst.attr("code") = py::str(std::string(to_string(e.code())));
            PyErr_SetObject(error_type.ptr(), inst.ptr());
        }
    });

    py::class_<EncodedMatrix>(mod, "EncodedMatrix")
        .def_readonly("machines", &EncodedMatrix::machines)
        .def_readonly("stream_length", &EncodedMatrix::stream_length)
        .def_readonly("n_rows", &EncodedMatrix::n_rows)
        .def_readonly("n_cols", &EncodedMatrix::n_cols)
        .def_readonly("values", &EncodedMatrix::values)
        .def_readonly("col_idx", &EncodedMatrix::col_idx)
        .def_property_readonly("row_len",
                               [](const EncodedMatrix& e) -> py::object {
                                   if (const auto* rl = std::get_if<RowLengths>(&e.structure))
                                       return py::cast(rl->per_machine);
                                   return py::none();
                               })
        .def_property_readonly("row_blocks",
                               [](const EncodedMatrix& e) -> py::object {
                                   if (const auto* rb = std::get_if<RowBlocks>(&e.structure))
                                       return py::cast(rb->counts);
                                   return py::none();
                               })
        .def("slot_rows", &decode_slot_rows)
        .def("to_json", &encoded_to_json, py::arg("indent") = -1)
        .def_static("from_json", [](const std::string& text) { return encoded_from_json(text); })
        .def("__eq__", [](const EncodedMatrix& a, const EncodedMatrix& b) { return a == b; });

    py::class_<SpmvResult>(mod, "SpmvResult")
        .def_readonly("y", &SpmvResult::y)
        .def_readonly("encoded", &SpmvResult::encoded)
        .def_property_readonly("stats_json", [](const SpmvResult& r) { return stats(r.trace).to_json(); })
        .def_property_readonly("events_csv", [](const SpmvResult& r) { return r.trace.events_csv(); })
        .def_property_readonly("reductions_csv", [](const SpmvResult& r) { return r.trace.reductions_csv(); })
        .def_property_readonly("rounds", [](const SpmvResult& r) { return r.trace.rounds; });

    mod.def("design_names", &design_names);

    mod.def("read_matrix_market", [](const std::string& path) { return to_array(read_matrix_market(path)); },
            py::arg("path"));
    mod.def("parse_matrix_market", [](const std::string& text) { return to_array(parse_matrix_market(std::string_view(text))); },
            py::arg("text"));

    mod.def(
        "encode",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a, const std::string& design,
           std::optional<std::size_t> machines, std::optional<std::size_t> k) {
            // Encoding does not involve a reduction circuit, so adders stay at 1.
            std::optional<std::size_t> adders;
            if (design == "cisr") adders = 1;
            return encode_for(to_dense(a), resolve(descriptor(design, machines, adders, k, std::nullopt)));
        },
        py::arg("a"), py::arg("design") = "cisr", py::arg("machines") = py::none(), py::arg("k") = py::none());

    mod.def("decode", [](const EncodedMatrix& e) { return to_array(decode(e)); }, py::arg("encoded"));
    mod.def("verify_integrity", [](const EncodedMatrix& e) { return verify_integrity(e).problems; },
            py::arg("encoded"));

    mod.def(
        "spmv",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a, std::vector<double> x,
           const std::string& design, std::optional<std::size_t> machines, std::optional<std::size_t> adders,
           std::optional<std::size_t> k, std::optional<std::size_t> levels) {
            return run_design(descriptor(design, machines, adders, k, levels), to_dense(a), x);
        },
        py::arg("a"), py::arg("x"), py::arg("design") = "cisr", py::arg("machines") = py::none(),
        py::arg("adders") = py::none(), py::arg("k") = py::none(), py::arg("levels") = py::none());

    mod.def(
        "spmv_oracle",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a, const std::vector<double>& x) {
            return spmv_oracle(to_dense(a), x);
        },
        py::arg("a"), py::arg("x"));
}
