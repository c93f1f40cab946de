#pragma once

#include <cstdint>
#include <mutex>
#include <optional>

namespace canopy::harness {

/// Single-slot exchange between threads: the writer overwrites, the reader
/// sees the latest value and a sequence number that grows with every put.
template <class T>
class Mailbox {
 public:
  struct Entry {
    T value;
    std::uint64_t seq;
  };

  void put(T value) {
    std::lock_guard<std::mutex> lock(mutex_);
    slot_ = std::move(value);
    ++seq_;
  }

  std::optional<Entry> latest() const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!slot_) return std::nullopt;
    return Entry{*slot_, seq_};
  }

 private:
  mutable std::mutex mutex_;
  std::optional<T> slot_;
  std::uint64_t seq_ = 0;
};

}  // namespace canopy::harness
