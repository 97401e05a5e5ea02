#pragma once

#include "hopls/regression.hpp"
#include "hopls/tensor.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace hopls {

/// Tensor file layout:
///
///     TEN1 <order> <d1,d2,...,dN> f64 row-major\n
///     <prod(d) little-endian IEEE-754 doubles>
///
/// Anything after the payload, or a payload of the wrong length, is a FormatError.
std::string encode_tensor(const DenseTensor& t);
DenseTensor decode_tensor(std::string_view bytes);

void write_tensor_file(const std::filesystem::path& path, const DenseTensor& t);
DenseTensor read_tensor_file(const std::filesystem::path& path);

inline constexpr int kModelFormatVersion = 1;

/// Model file: a JSON document
///
///     {"format": "hopls-model", "version": 1, "algorithm": "hopls"|"hopls2"|"pls",
///      "fitted_as": <CLI algorithm name>, "payload": {...},
///      "checksum": "fnv1a64:<16 hex digits>"}
///
/// The checksum covers the compact serialization of "payload". Doubles are
/// written in shortest round-trip form, so a reloaded model predicts
/// bit-identically.
struct LoadedModel {
    AnyModel model;
    std::string fitted_as;
    std::string checksum;
};

std::string encode_model(const AnyModel& model, std::string_view fitted_as = {});
LoadedModel decode_model(std::string_view text);

void save_model(const std::filesystem::path& path, const AnyModel& model, std::string_view fitted_as = {});
LoadedModel load_model(const std::filesystem::path& path);

/// The checksum string save_model would record for `model`.
std::string model_checksum(const AnyModel& model);

}  // namespace hopls
