#include "vocadapt/errors.hpp"

namespace vocadapt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::EncodingError: return "EncodingError";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DuplicateToken: return "DuplicateToken";
    case ErrorCode::EmptyToken: return "EmptyToken";
    case ErrorCode::TargetTooSmall: return "TargetTooSmall";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::MissingBaseVector: return "MissingBaseVector";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace vocadapt
