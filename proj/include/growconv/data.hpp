#ifndef GROWCONV_DATA_HPP
#define GROWCONV_DATA_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "growconv/rng.hpp"
#include "growconv/tensor.hpp"

namespace growconv {

struct Dataset {
    std::vector<Tensor3> images;  // values in [0,1] (raw bytes / 255)
    std::vector<int> labels;
    int n_classes = 0;
    std::string name;

    int size() const { return static_cast<int>(images.size()); }
};

// IDX pair (big-endian headers; image magic 2051, label magic 2049).
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

enum class CifarVariant { kCifar10, kCifar100Fine };

// CIFAR binary batches: per record one label byte (cifar10) or
// coarse+fine label bytes (cifar100, coarse ignored), then 3072 pixel
// bytes planar R,G,B, reassembled to interleaved 32x32x3.
Dataset load_cifar(const std::vector<std::string>& batch_paths, CifarVariant variant);

// Seeded shuffle, then first n_head images vs the rest.
std::pair<Dataset, Dataset> split(const Dataset& dataset, int n_head, std::uint64_t seed);

// Epoch-shuffled index iteration, reproducible from the seed.
class BatchIterator {
public:
    BatchIterator(const Dataset& dataset, int batch_size, std::uint64_t seed)
        : dataset_(&dataset), batch_size_(batch_size), rng_(seed) {}

    // Indices of the next batch; reshuffles at each epoch boundary.
    std::vector<int> next_batch();
    int epoch() const { return epoch_; }

private:
    const Dataset* dataset_;
    int batch_size_;
    Rng rng_;
    std::vector<int> order_;
    std::size_t cursor_ = 0;
    int epoch_ = -1;
};

}  // namespace growconv

#endif
