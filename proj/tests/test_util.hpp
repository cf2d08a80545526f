#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "hubshift/orders.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<std::uint64_t> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        path = base / ("hubshift_test_" + std::to_string(::getpid()) + "_" +
                       std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline hubshift::Order make_order(const std::string& user, const std::string& restaurant,
                                  double lat, double lon, const std::string& when,
                                  double minutes) {
    hubshift::Order o;
    o.user_id = user;
    o.restaurant_id = restaurant;
    o.location = {lat, lon};
    o.delivered_at = *hubshift::parse_minute(when);
    o.delivery_minutes = minutes;
    return o;
}

}  // namespace testutil
