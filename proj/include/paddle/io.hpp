#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "paddle/types.hpp"

namespace paddle {

/// Binary feature-bank layout (all integers and floats little-endian):
///
///   offset 0   8 bytes   magic "FSBANK01"
///   offset 8   u32       dim
///   offset 12  u32       n_rows
///   offset 16  n_rows x { u32 class_id, dim x f32 }
inline constexpr std::string_view kBankMagic = "FSBANK01";

/// Parses a bank from memory. Binary when the buffer starts with the magic,
/// CSV (`class_id,f0,...,f{d-1}` header plus one row per vector) otherwise.
/// Classes appear in order of first occurrence.
FeatureBank parse_feature_bank(std::string_view bytes);

FeatureBank load_feature_bank(const std::filesystem::path& path);

std::string encode_feature_bank_binary(const FeatureBank& bank);
std::string encode_feature_bank_csv(const FeatureBank& bank);

enum class BankFormat { binary, csv };

void save_feature_bank(const FeatureBank& bank, const std::filesystem::path& path,
                       BankFormat format = BankFormat::binary);

/// Optional `<bank>.labels` sidecar (`class_id,name` CSV). Returns an empty
/// map when the file does not exist.
std::map<std::uint32_t, std::string> load_class_names(const std::filesystem::path& bank_path);

/// One row of the per-task results file.
struct ResultRecord {
    std::size_t task_index = 0;
    std::string method;
    int k_total = 0;
    int k_effective = 0;
    int shots = 0;
    int query_size = 0;
    double lambda = 0.0;
    double accuracy = 0.0;
    int effective_class_count = 0;
    int iterations = 0;
    double wall_time_seconds = 0.0;
    std::uint64_t seed = 0;
};

/// Column order of the results CSV.
inline constexpr std::string_view kResultsHeader
    = "task_index,method,k_total,k_effective,shots,query_size,lambda,accuracy,"
      "effective_class_count,iterations,wall_time_seconds,seed";

/// Reals are written with 6 significant digits.
std::string format_results(const std::vector<ResultRecord>& records);
void save_results(const std::vector<ResultRecord>& records, const std::filesystem::path& path);

std::vector<ResultRecord> parse_results(std::string_view text);
std::vector<ResultRecord> load_results(const std::filesystem::path& path);

/// Shortest-round-trip formatting with `digits` significant digits.
std::string format_real(double x, int digits = 6);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace paddle
