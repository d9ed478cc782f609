#pragma once

#include <stdexcept>
#include <string>

namespace ledtap {

/// Base class for every recoverable error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define LEDTAP_DECLARE_ERROR(Name)                         \
    class Name : public Error {                            \
    public:                                                \
        explicit Name(const std::string& what)             \
            : Error(std::string(#Name ": ") + what) {}     \
    }

// Sampling too coarse for the waveform it has to represent.
LEDTAP_DECLARE_ERROR(SampleRateTooLow);
// Dynamic range below the noise floor; nothing to binarize.
LEDTAP_DECLARE_ERROR(FlatSignal);
// No mark-to-space edge anywhere in the input.
LEDTAP_DECLARE_ERROR(NoStartEdge);
LEDTAP_DECLARE_ERROR(LengthMismatch);
LEDTAP_DECLARE_ERROR(InsufficientTransitions);
LEDTAP_DECLARE_ERROR(NoDominantPeak);
// Sample levels are not close to integer multiples of the unit amplitude.
LEDTAP_DECLARE_ERROR(AmplitudeMismatch);
LEDTAP_DECLARE_ERROR(ClockSlipDetected);
LEDTAP_DECLARE_ERROR(FramingError);
LEDTAP_DECLARE_ERROR(ConfigError);

#undef LEDTAP_DECLARE_ERROR

}  // namespace ledtap
