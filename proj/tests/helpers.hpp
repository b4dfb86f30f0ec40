#pragma once

#include "fer/image.hpp"
#include "fer/rng.hpp"

#include <filesystem>
#include <string>

#include <unistd.h>

namespace testutil {

inline fer::GrayImage random_gray(int w, int h, fer::Rng& rng) {
    fer::GrayImage img(w, h);
    for (double& v : img.data) v = rng.uniform();
    return img;
}

inline fer::RgbImage random_rgb(int w, int h, fer::Rng& rng) {
    fer::RgbImage img(w, h);
    for (double& v : img.r) v = rng.uniform();
    for (double& v : img.g) v = rng.uniform();
    for (double& v : img.b) v = rng.uniform();
    return img;
}

// Self-cleaning unique temp directory.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("fer_test_" + tag + "_" + std::to_string(++counter) + "_" +
                 std::to_string(static_cast<unsigned>(::getpid())));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

} // namespace testutil
