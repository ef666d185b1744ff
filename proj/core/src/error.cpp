#include "incite/error.hpp"

namespace incite {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotInCitation: return "NotInCitation";
    case ErrorKind::EmptyCue: return "EmptyCue";
    case ErrorKind::BadYear: return "BadYear";
    case ErrorKind::AuthFailed: return "AuthFailed";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::Transport: return "Transport";
    case ErrorKind::MalformedResponse: return "MalformedResponse";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::NoAuthors: return "NoAuthors";
    case ErrorKind::DuplicateKey: return "DuplicateKey";
    case ErrorKind::StaleFile: return "StaleFile";
    case ErrorKind::Io: return "Io";
    case ErrorKind::NoBibTarget: return "NoBibTarget";
    case ErrorKind::EmptyResults: return "EmptyResults";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace incite
