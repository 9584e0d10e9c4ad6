#pragma once

#include <stdexcept>
#include <string>

namespace vtpseg {

// Invalid run configuration or unusable input files; maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// File-level read/write failure.
struct IoError : std::runtime_error {
    IoError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path(std::move(path)) {}
    std::string path;
};

// Evaluation input problem (missing counterpart, dimension mismatch, bad labels).
struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

// A model backend failed; carries the backend name and the image identity.
class BackendError : public std::runtime_error {
  public:
    BackendError(std::string backend, std::string image_id, const std::string& what)
        : std::runtime_error(backend + " [image '" + image_id + "']: " + what),
          backend_(std::move(backend)),
          image_id_(std::move(image_id)) {}

    const std::string& backend() const { return backend_; }
    const std::string& image_id() const { return image_id_; }

  private:
    std::string backend_;
    std::string image_id_;
};

}  // namespace vtpseg
