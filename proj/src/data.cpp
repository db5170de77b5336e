#include "growconv/data.hpp"

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "growconv/errors.hpp"

namespace growconv {

namespace {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;

std::vector<unsigned char> read_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open " + path);
    f.seekg(0, std::ios::end);
    const std::streamoff len = f.tellg();
    f.seekg(0, std::ios::beg);
    std::vector<unsigned char> buf(static_cast<std::size_t>(len));
    f.read(reinterpret_cast<char*>(buf.data()), len);
    if (!f) throw DataError("failed reading " + path);
    return buf;
}

std::uint32_t be32(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const auto img_buf = read_binary(images_path);
    if (img_buf.size() < 16) throw DataError(images_path + ": truncated IDX header");
    const std::uint32_t img_magic = be32(&img_buf[0]);
    if (img_magic != kImageMagic)
        throw DataError(images_path + ": wrong magic " + std::to_string(img_magic) +
                        ", expected " + std::to_string(kImageMagic));
    const std::uint32_t count = be32(&img_buf[4]);
    const std::uint32_t rows = be32(&img_buf[8]);
    const std::uint32_t cols = be32(&img_buf[12]);
    const std::size_t need = 16 + static_cast<std::size_t>(count) * rows * cols;
    if (img_buf.size() < need)
        throw DataError(images_path + ": truncated, have " + std::to_string(img_buf.size()) +
                        " bytes, need " + std::to_string(need));

    const auto lbl_buf = read_binary(labels_path);
    if (lbl_buf.size() < 8) throw DataError(labels_path + ": truncated IDX header");
    const std::uint32_t lbl_magic = be32(&lbl_buf[0]);
    if (lbl_magic != kLabelMagic)
        throw DataError(labels_path + ": wrong magic " + std::to_string(lbl_magic) +
                        ", expected " + std::to_string(kLabelMagic));
    const std::uint32_t lbl_count = be32(&lbl_buf[4]);
    if (lbl_count != count)
        throw DataError("count mismatch: " + std::to_string(count) + " images vs " +
                        std::to_string(lbl_count) + " labels");
    if (lbl_buf.size() < 8 + lbl_count) throw DataError(labels_path + ": truncated");

    Dataset ds;
    ds.name = "idx";
    ds.images.reserve(count);
    ds.labels.reserve(count);
    int max_label = 0;
    const unsigned char* px = img_buf.data() + 16;
    for (std::uint32_t n = 0; n < count; ++n) {
        Tensor3 img(static_cast<int>(rows), static_cast<int>(cols), 1);
        for (std::size_t i = 0; i < static_cast<std::size_t>(rows) * cols; ++i)
            img.data[i] = static_cast<double>(px[i]) / 255.0;
        px += static_cast<std::size_t>(rows) * cols;
        ds.images.push_back(std::move(img));
        const int label = lbl_buf[8 + n];
        ds.labels.push_back(label);
        max_label = std::max(max_label, label);
    }
    ds.n_classes = max_label + 1;
    return ds;
}

Dataset load_cifar(const std::vector<std::string>& batch_paths, CifarVariant variant) {
    const std::size_t label_bytes = variant == CifarVariant::kCifar10 ? 1 : 2;
    const std::size_t record = label_bytes + 3072;

    Dataset ds;
    ds.name = variant == CifarVariant::kCifar10 ? "cifar10" : "cifar100";
    ds.n_classes = variant == CifarVariant::kCifar10 ? 10 : 100;

    for (const std::string& path : batch_paths) {
        const auto buf = read_binary(path);
        if (buf.size() % record != 0)
            throw DataError(path + ": size " + std::to_string(buf.size()) +
                            " is not a multiple of the record size " + std::to_string(record));
        const std::size_t n = buf.size() / record;
        for (std::size_t r = 0; r < n; ++r) {
            const unsigned char* rec = buf.data() + r * record;
            // cifar100 records carry coarse then fine label; fine is used
            const int label = rec[label_bytes - 1];
            const unsigned char* planes = rec + label_bytes;
            Tensor3 img(32, 32, 3);
            for (int i = 0; i < 32; ++i)
                for (int j = 0; j < 32; ++j)
                    for (int c = 0; c < 3; ++c)
                        img.at(i, j, c) =
                            static_cast<double>(planes[c * 1024 + i * 32 + j]) / 255.0;
            ds.images.push_back(std::move(img));
            ds.labels.push_back(label);
        }
    }
    return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, int n_head, std::uint64_t seed) {
    if (n_head > dataset.size())
        throw ConfigError("split: n_head " + std::to_string(n_head) + " exceeds dataset size " +
                          std::to_string(dataset.size()));
    Rng rng(seed);
    std::vector<int> order = rng.permutation(dataset.size());

    Dataset head, tail;
    head.n_classes = tail.n_classes = dataset.n_classes;
    head.name = dataset.name + "/head";
    tail.name = dataset.name + "/tail";
    for (int i = 0; i < dataset.size(); ++i) {
        Dataset& dst = i < n_head ? head : tail;
        dst.images.push_back(dataset.images[order[i]]);
        dst.labels.push_back(dataset.labels[order[i]]);
    }
    return {std::move(head), std::move(tail)};
}

std::vector<int> BatchIterator::next_batch() {
    if (cursor_ >= order_.size()) {
        order_ = rng_.permutation(dataset_->size());
        cursor_ = 0;
        ++epoch_;
    }
    const std::size_t end = std::min(cursor_ + static_cast<std::size_t>(batch_size_),
                                     order_.size());
    std::vector<int> batch(order_.begin() + cursor_, order_.begin() + end);
    cursor_ = end;
    return batch;
}

}  // namespace growconv
