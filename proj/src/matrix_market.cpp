#include "sparsespace/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "sparsespace/error.hpp"

namespace sparsespace {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        std::size_t end = pos;
        while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
        if (end > pos) tokens.push_back(line.substr(pos, end - pos));
        pos = end;
    }
    return tokens;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

[[noreturn]] void fail(ErrorCode code, std::size_t line_no, const std::string& msg) {
    throw Error(code, "line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

DenseMatrix parse_matrix_market(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) fail(ErrorCode::MalformedHeader, 1, "empty input");
    ++line_no;
    auto banner = split_ws(line);
    if (banner.empty() || lower(banner[0]) != "%%matrixmarket") {
        fail(ErrorCode::MalformedHeader, line_no, "missing %%MatrixMarket banner");
    }
    if (banner.size() != 5) fail(ErrorCode::MalformedHeader, line_no, "banner needs object, format, field, symmetry");
    const std::string object = lower(banner[1]);
    const std::string format = lower(banner[2]);
    const std::string field = lower(banner[3]);
    const std::string symmetry = lower(banner[4]);
    if (object != "matrix" || format != "coordinate" || field != "real" || symmetry != "general") {
        fail(ErrorCode::UnsupportedKind, line_no,
             "only 'matrix coordinate real general' is supported, got '" + object + " " + format + " " + field +
                 " " + symmetry + "'");
    }

    // Size line, after any comments.
    std::size_t rows = 0, cols = 0, declared = 0;
    bool have_size = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line) || line.front() == '%') continue;
        auto tok = split_ws(line);
        if (tok.size() != 3 || !parse_number(tok[0], rows) || !parse_number(tok[1], cols) ||
            !parse_number(tok[2], declared)) {
            fail(ErrorCode::MalformedHeader, line_no, "size line must be 'rows cols nonzeros'");
        }
        if (rows == 0 || cols == 0) fail(ErrorCode::MalformedHeader, line_no, "dimensions must be positive");
        have_size = true;
        break;
    }
    if (!have_size) fail(ErrorCode::MalformedHeader, line_no + 1, "missing size line");

    DenseMatrix a(rows, cols);
    std::vector<bool> seen(rows * cols, false);
    std::size_t found = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line) || line.front() == '%') continue;
        if (found == declared) {
            fail(ErrorCode::MalformedEntry, line_no, "more entries than the declared " + std::to_string(declared));
        }
        auto tok = split_ws(line);
        std::size_t i = 0, j = 0;
        double v = 0.0;
        if (tok.size() != 3 || !parse_number(tok[0], i) || !parse_number(tok[1], j) || !parse_number(tok[2], v)) {
            fail(ErrorCode::MalformedEntry, line_no, "entry must be 'row col value'");
        }
        if (i < 1 || i > rows || j < 1 || j > cols) {
            fail(ErrorCode::IndexOutOfDeclaredBounds, line_no,
                 "index (" + std::to_string(i) + ", " + std::to_string(j) + ") outside declared " +
                     std::to_string(rows) + "x" + std::to_string(cols));
        }
        const std::size_t flat = (i - 1) * cols + (j - 1);
        if (seen[flat]) fail(ErrorCode::DuplicateEntry, line_no, "duplicate entry");
        seen[flat] = true;
        a(i - 1, j - 1) = v;
        ++found;
    }
    if (found != declared) {
        fail(ErrorCode::MalformedEntry, line_no,
             "expected " + std::to_string(declared) + " entries, found " + std::to_string(found));
    }
    return a;
}

DenseMatrix parse_matrix_market(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_matrix_market(in);
}

DenseMatrix read_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
    return parse_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const DenseMatrix& a) {
    const auto nz = a.nonzeros();
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << nz.size() << '\n';
    for (const auto& t : nz) {
        out << (t.row + 1) << ' ' << (t.col + 1) << ' ' << format_number(t.value) << '\n';
    }
}

std::string to_matrix_market(const DenseMatrix& a) {
    std::ostringstream out;
    write_matrix_market(out, a);
    return out.str();
}

}  // namespace sparsespace
