#pragma once

#include <stdexcept>
#include <string>

namespace sobnet {

enum class Status {
    ok = 0,
    invalid_argument,
    dimension_mismatch,
    unknown_activation,
    order_exceeds_smoothness,
    unsupported,
    contract_failure,
    not_encodable,
    decode_error,
    io_error,
    internal,
};

const char* status_name(Status s);

class Error : public std::runtime_error {
public:
    Error(Status code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Status code() const { return code_; }

private:
    Status code_;
};

[[noreturn]] inline void fail(Status code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Status code, const std::string& what)
{
    if (!cond) fail(code, what);
}

} // namespace sobnet
