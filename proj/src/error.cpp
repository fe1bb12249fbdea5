#include "error.hpp"

namespace sobnet {

const char* status_name(Status s)
{
    switch (s) {
    case Status::ok: return "ok";
    case Status::invalid_argument: return "invalid_argument";
    case Status::dimension_mismatch: return "dimension_mismatch";
    case Status::unknown_activation: return "unknown_activation";
    case Status::order_exceeds_smoothness: return "order_exceeds_smoothness";
    case Status::unsupported: return "unsupported";
    case Status::contract_failure: return "contract_failure";
    case Status::not_encodable: return "not_encodable";
    case Status::decode_error: return "decode_error";
    case Status::io_error: return "io_error";
    case Status::internal: return "internal";
    }
    return "unknown";
}

} // namespace sobnet
