#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

// Scratch directory under the system temp root, removed on destruction.
// Each instance gets a unique name so tests can run concurrently.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        std::random_device rd;
        const std::string name = "panosphere_" + tag + "_" + std::to_string(rd()) + "_" +
                                 std::to_string(counter.fetch_add(1));
        path = std::filesystem::temp_directory_path() / name;
        std::filesystem::create_directories(path);
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    std::filesystem::path operator/(const std::string& leaf) const { return path / leaf; }
};
