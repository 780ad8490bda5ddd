#pragma once

#include <stdexcept>
#include <string>

namespace cvad {

// Error categories; values match the C API status codes and CLI exit codes.
enum class ErrorCode {
    config = 1,
    backend = 2,
    data = 3,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline Error config_error(const std::string& msg) { return Error(ErrorCode::config, msg); }
inline Error backend_error(const std::string& msg) { return Error(ErrorCode::backend, msg); }
inline Error data_error(const std::string& msg) { return Error(ErrorCode::data, msg); }

} // namespace cvad
