#include "paddle/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "paddle/error.hpp"

namespace paddle {

namespace {

std::uint32_t read_u32(std::string_view bytes, std::size_t offset)
{
    std::uint32_t x = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        x |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
    }
    return x;
}

void append_u32(std::string& out, std::uint32_t x)
{
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((x >> (8 * i)) & 0xFFu));
    }
}

// Accumulates rows into classes keyed by id, preserving first-seen order.
class BankBuilder {
public:
    explicit BankBuilder(std::size_t dim) : dim_(dim) {}

    std::vector<float>& row_for(std::uint32_t class_id)
    {
        auto [it, inserted] = index_.try_emplace(class_id, rows_.size());
        if (inserted) {
            ids_.push_back(class_id);
            rows_.emplace_back();
        }
        return rows_[it->second];
    }

    FeatureBank finish() &&
    {
        FeatureBank bank;
        bank.dim = dim_;
        for (std::size_t c = 0; c < ids_.size(); ++c) {
            const auto n = static_cast<Eigen::Index>(rows_[c].size() / dim_);
            ClassRecord record;
            record.class_id = ids_[c];
            record.vectors = Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic,
                                                           Eigen::RowMajor>>(
                rows_[c].data(), n, static_cast<Eigen::Index>(dim_));
            bank.classes.push_back(std::move(record));
        }
        return bank;
    }

private:
    std::size_t dim_;
    std::unordered_map<std::uint32_t, std::size_t> index_;
    std::vector<std::uint32_t> ids_;
    std::vector<std::vector<float>> rows_;
};

FeatureBank parse_binary(std::string_view bytes)
{
    constexpr std::size_t header_size = 16;
    if (bytes.size() < header_size) {
        throw ParseError("truncated header: file has " + std::to_string(bytes.size())
                         + " bytes, header needs 16");
    }
    const std::uint32_t dim = read_u32(bytes, 8);
    const std::uint32_t n_rows = read_u32(bytes, 12);
    if (dim == 0) {
        throw ParseError("header at byte 8 declares dim = 0");
    }
    if (n_rows == 0) {
        throw ParseError("empty bank: header at byte 12 declares n_rows = 0");
    }
    const std::uint64_t record_size = 4 + 4 * static_cast<std::uint64_t>(dim);
    const std::uint64_t expected = header_size + record_size * n_rows;
    if (bytes.size() < expected) {
        const std::uint64_t complete = (bytes.size() - header_size) / record_size;
        throw ParseError("truncated payload: expected " + std::to_string(expected)
                         + " bytes, got " + std::to_string(bytes.size()) + "; row "
                         + std::to_string(complete) + " is incomplete at byte "
                         + std::to_string(header_size + complete * record_size));
    }
    if (bytes.size() > expected) {
        throw ParseError("trailing data: expected " + std::to_string(expected) + " bytes, got "
                         + std::to_string(bytes.size()));
    }

    BankBuilder builder(dim);
    std::size_t offset = header_size;
    for (std::uint32_t r = 0; r < n_rows; ++r) {
        const std::uint32_t class_id = read_u32(bytes, offset);
        auto& row = builder.row_for(class_id);
        offset += 4;
        for (std::uint32_t j = 0; j < dim; ++j) {
            const float x = std::bit_cast<float>(read_u32(bytes, offset));
            if (!std::isfinite(x)) {
                throw ParseError("non-finite value in row " + std::to_string(r) + " at byte "
                                 + std::to_string(offset));
            }
            row.push_back(x);
            offset += 4;
        }
    }
    return std::move(builder).finish();
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

template <class T>
bool parse_number(std::string_view text, T& out)
{
    text = trim(text);
    if (text.empty()) {
        return false;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

// Calls fn(line_number, line) for each non-empty line (1-based numbering).
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn)
{
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        ++line_no;
        const auto line = trim(text.substr(start, end - start));
        if (!line.empty()) {
            fn(line_no, line);
        }
        start = end + 1;
    }
}

FeatureBank parse_csv(std::string_view text)
{
    std::size_t dim = 0;
    bool have_header = false;
    std::optional<BankBuilder> builder;
    std::size_t rows = 0;

    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto fields = split(line, ',');
        const std::string where = "line " + std::to_string(line_no);
        if (!have_header) {
            if (trim(fields[0]) != "class_id" || fields.size() < 2) {
                throw ParseError(where + ": expected header 'class_id,f0,...'");
            }
            dim = fields.size() - 1;
            have_header = true;
            builder.emplace(dim);
            return;
        }
        if (fields.size() != dim + 1) {
            throw ParseError(where + ": expected " + std::to_string(dim + 1) + " fields, got "
                             + std::to_string(fields.size()));
        }
        std::uint32_t class_id = 0;
        if (!parse_number(fields[0], class_id)) {
            throw ParseError(where + ": invalid class_id '" + std::string(trim(fields[0])) + "'");
        }
        auto& row = builder->row_for(class_id);
        for (std::size_t j = 0; j < dim; ++j) {
            float x = 0.0f;
            if (!parse_number(fields[j + 1], x) || !std::isfinite(x)) {
                throw ParseError(where + ", column " + std::to_string(j + 2)
                                 + ": invalid or non-finite value '"
                                 + std::string(trim(fields[j + 1])) + "'");
            }
            row.push_back(x);
        }
        ++rows;
    });
    if (!have_header) {
        throw ParseError("line 1: missing CSV header");
    }
    if (rows == 0) {
        throw ParseError("empty bank: CSV has a header but no rows");
    }
    return std::move(*builder).finish();
}

} // namespace

FeatureBank parse_feature_bank(std::string_view bytes)
{
    FeatureBank bank = bytes.substr(0, kBankMagic.size()) == kBankMagic ? parse_binary(bytes)
                                                                        : parse_csv(bytes);
    bank.validate();
    return bank;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw Error("error while reading '" + path.string() + "'");
    }
    return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
        throw Error("error while writing '" + path.string() + "'");
    }
}

FeatureBank load_feature_bank(const std::filesystem::path& path)
{
    try {
        return parse_feature_bank(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string encode_feature_bank_binary(const FeatureBank& bank)
{
    const auto n_rows = bank.total_vectors();
    std::string out;
    out.reserve(16 + n_rows * (4 + 4 * bank.dim));
    out.append(kBankMagic);
    append_u32(out, static_cast<std::uint32_t>(bank.dim));
    append_u32(out, static_cast<std::uint32_t>(n_rows));
    for (const auto& c : bank.classes) {
        for (Eigen::Index i = 0; i < c.vectors.rows(); ++i) {
            append_u32(out, c.class_id);
            for (Eigen::Index j = 0; j < c.vectors.cols(); ++j) {
                append_u32(out, std::bit_cast<std::uint32_t>(c.vectors(i, j)));
            }
        }
    }
    return out;
}

std::string encode_feature_bank_csv(const FeatureBank& bank)
{
    std::string out = "class_id";
    for (std::size_t j = 0; j < bank.dim; ++j) {
        out += ",f" + std::to_string(j);
    }
    out += '\n';
    char buf[32];
    for (const auto& c : bank.classes) {
        for (Eigen::Index i = 0; i < c.vectors.rows(); ++i) {
            out += std::to_string(c.class_id);
            for (Eigen::Index j = 0; j < c.vectors.cols(); ++j) {
                // 9 significant digits round-trip any float exactly
                std::snprintf(buf, sizeof buf, ",%.9g", static_cast<double>(c.vectors(i, j)));
                out += buf;
            }
            out += '\n';
        }
    }
    return out;
}

void save_feature_bank(const FeatureBank& bank, const std::filesystem::path& path,
                       BankFormat format)
{
    bank.validate();
    write_file(path, format == BankFormat::binary ? encode_feature_bank_binary(bank)
                                                  : encode_feature_bank_csv(bank));
}

std::map<std::uint32_t, std::string> load_class_names(const std::filesystem::path& bank_path)
{
    std::map<std::uint32_t, std::string> names;
    auto sidecar = bank_path;
    sidecar += ".labels";
    if (!std::filesystem::exists(sidecar)) {
        return names;
    }
    const std::string text = read_file(sidecar);
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto comma = line.find(',');
        std::uint32_t id = 0;
        if (comma == std::string_view::npos || !parse_number(line.substr(0, comma), id)) {
            if (line_no == 1) {
                return; // header
            }
            throw ParseError(sidecar.string() + ": line " + std::to_string(line_no)
                             + ": expected 'class_id,name'");
        }
        names[id] = std::string(trim(line.substr(comma + 1)));
    });
    return names;
}

std::string format_real(double x, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string format_results(const std::vector<ResultRecord>& records)
{
    std::string out(kResultsHeader);
    out += '\n';
    for (const auto& r : records) {
        out += std::to_string(r.task_index);
        out += ',';
        out += r.method;
        out += ',' + std::to_string(r.k_total);
        out += ',' + std::to_string(r.k_effective);
        out += ',' + std::to_string(r.shots);
        out += ',' + std::to_string(r.query_size);
        out += ',' + format_real(r.lambda);
        out += ',' + format_real(r.accuracy);
        out += ',' + std::to_string(r.effective_class_count);
        out += ',' + std::to_string(r.iterations);
        out += ',' + format_real(r.wall_time_seconds);
        out += ',' + std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

void save_results(const std::vector<ResultRecord>& records, const std::filesystem::path& path)
{
    for (const auto& r : records) {
        if (!(r.accuracy >= 0.0 && r.accuracy <= 1.0)) {
            throw InvariantError("result accuracy outside [0, 1] for task "
                                 + std::to_string(r.task_index));
        }
        if (r.method.find_first_of(",\n") != std::string::npos) {
            throw InvariantError("method name '" + r.method + "' contains a separator");
        }
    }
    write_file(path, format_results(records));
}

std::vector<ResultRecord> parse_results(std::string_view text)
{
    std::vector<ResultRecord> records;
    bool have_header = false;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const std::string where = "line " + std::to_string(line_no);
        if (!have_header) {
            if (line != kResultsHeader) {
                throw ParseError(where + ": unexpected results header");
            }
            have_header = true;
            return;
        }
        const auto f = split(line, ',');
        if (f.size() != 12) {
            throw ParseError(where + ": expected 12 fields, got " + std::to_string(f.size()));
        }
        ResultRecord r;
        r.method = std::string(trim(f[1]));
        const bool ok = parse_number(f[0], r.task_index) && parse_number(f[2], r.k_total)
                        && parse_number(f[3], r.k_effective) && parse_number(f[4], r.shots)
                        && parse_number(f[5], r.query_size) && parse_number(f[6], r.lambda)
                        && parse_number(f[7], r.accuracy)
                        && parse_number(f[8], r.effective_class_count)
                        && parse_number(f[9], r.iterations)
                        && parse_number(f[10], r.wall_time_seconds)
                        && parse_number(f[11], r.seed);
        if (!ok) {
            throw ParseError(where + ": malformed field");
        }
        records.push_back(std::move(r));
    });
    if (!have_header) {
        throw ParseError("line 1: missing results header");
    }
    return records;
}

std::vector<ResultRecord> load_results(const std::filesystem::path& path)
{
    try {
        return parse_results(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace paddle
