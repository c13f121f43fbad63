#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hogt/tensor.hpp"

namespace hogt {

// Little-endian: uint64 rank, uint64 dims[rank], float64 payload.
void write_tensor(std::ostream& out, const Tensor& t);
Tensor read_tensor(std::istream& in);

void write_tensors_file(const std::string& path, const std::vector<Tensor>& tensors);
std::vector<Tensor> read_tensors_file(const std::string& path);

}  // namespace hogt
