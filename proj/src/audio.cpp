#include "rtva/audio.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "rtva/errors.hpp"

namespace rtva::audio {

namespace {

constexpr uint16_t kWavFormatPcm = 1;

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back((uint8_t)(v & 0xff));
    out.push_back((uint8_t)(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back((uint8_t)(v & 0xff));
    out.push_back((uint8_t)((v >> 8) & 0xff));
    out.push_back((uint8_t)((v >> 16) & 0xff));
    out.push_back((uint8_t)((v >> 24) & 0xff));
}

uint16_t read_u16(const uint8_t* p) { return (uint16_t)(p[0] | (p[1] << 8)); }

uint32_t read_u32(const uint8_t* p) {
    return (uint32_t)p[0] | ((uint32_t)p[1] << 8) | ((uint32_t)p[2] << 16) |
           ((uint32_t)p[3] << 24);
}

}  // namespace

void FramingConfig::validate() const {
    if (frame_ms <= 0 || sample_rate_hz <= 0) {
        throw ParamError("framing: frame_ms and sample_rate_hz must be positive");
    }
    if ((frame_ms * sample_rate_hz) % 1000 != 0) {
        throw ParamError("framing: frame_ms * sample_rate_hz must be divisible by 1000");
    }
    if (1000 % frame_ms != 0) {
        throw ParamError("framing: frame_ms must divide 1000");
    }
}

std::pair<std::vector<AudioFrame>, int> frames_from_samples(
    std::span<const int16_t> samples, int sample_rate_hz, int frame_ms) {
    FramingConfig fc{frame_ms, sample_rate_hz};
    fc.validate();
    const size_t per_frame = (size_t)fc.samples_per_frame();

    std::vector<AudioFrame> frames;
    frames.reserve((samples.size() + per_frame - 1) / per_frame);
    size_t pos = 0;
    int padding = 0;
    while (pos < samples.size()) {
        AudioFrame f;
        f.sample_rate_hz = sample_rate_hz;
        const size_t take = std::min(per_frame, samples.size() - pos);
        f.samples.assign(samples.begin() + pos, samples.begin() + pos + take);
        if (take < per_frame) {
            padding = (int)(per_frame - take);
            f.samples.resize(per_frame, 0);
        }
        frames.push_back(std::move(f));
        pos += take;
    }
    return {std::move(frames), padding};
}

std::vector<int16_t> concat(const std::vector<AudioFrame>& frames) {
    std::vector<int16_t> out;
    size_t total = 0;
    for (const auto& f : frames) total += f.samples.size();
    out.reserve(total);
    for (const auto& f : frames) {
        out.insert(out.end(), f.samples.begin(), f.samples.end());
    }
    return out;
}

double rms_dbfs(std::span<const int16_t> samples) {
    if (samples.empty()) return -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (int16_t s : samples) acc += (double)s * (double)s;
    const double rms = std::sqrt(acc / (double)samples.size());
    if (rms <= 0.0) return -std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(rms / 32768.0);
}

WavContent read_pcm_wav(const std::string& path, int frame_ms) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open wav file: " + path);

    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on wav file: " + path);
    if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
        std::memcmp(data.data() + 8, "WAVE", 4) != 0) {
        throw FormatError("not a RIFF/WAVE file: " + path);
    }

    bool have_fmt = false;
    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    const uint8_t* pcm = nullptr;
    size_t pcm_bytes = 0;

    size_t pos = 12;
    while (pos + 8 <= data.size()) {
        const uint8_t* hdr = data.data() + pos;
        const uint32_t chunk_size = read_u32(hdr + 4);
        const size_t body = pos + 8;
        if (body + chunk_size > data.size()) {
            throw FormatError("truncated wav chunk in " + path);
        }
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw FormatError("short fmt chunk in " + path);
            format = read_u16(data.data() + body);
            channels = read_u16(data.data() + body + 2);
            rate = read_u32(data.data() + body + 4);
            bits = read_u16(data.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            pcm = data.data() + body;
            pcm_bytes = chunk_size;
        }
        pos = body + chunk_size + (chunk_size & 1);  // chunks are word aligned
    }

    if (!have_fmt || pcm == nullptr) throw FormatError("missing fmt/data chunk: " + path);
    if (format != kWavFormatPcm) throw FormatError("compressed wav not supported: " + path);
    if (channels != 1) throw FormatError("only mono wav supported: " + path);
    if (bits != 16) throw FormatError("only 16-bit PCM supported: " + path);
    if (rate == 0) throw FormatError("zero sample rate: " + path);

    std::vector<int16_t> samples(pcm_bytes / 2);
    for (size_t i = 0; i < samples.size(); ++i) {
        samples[i] = (int16_t)read_u16(pcm + 2 * i);
    }

    WavContent out;
    out.sample_rate_hz = (int)rate;
    auto [frames, padding] = frames_from_samples(samples, (int)rate, frame_ms);
    out.frames = std::move(frames);
    out.padding_samples = padding;
    return out;
}

void write_pcm_wav(const std::string& path, std::span<const int16_t> samples,
                   int sample_rate_hz) {
    if (sample_rate_hz <= 0) throw ParamError("wav write: bad sample rate");

    std::vector<uint8_t> out;
    const uint32_t data_bytes = (uint32_t)(samples.size() * 2);
    out.reserve(44 + data_bytes);

    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32(out, 36 + data_bytes);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    put_u32(out, 16);
    put_u16(out, kWavFormatPcm);
    put_u16(out, 1);  // mono
    put_u32(out, (uint32_t)sample_rate_hz);
    put_u32(out, (uint32_t)(sample_rate_hz * 2));  // byte rate
    put_u16(out, 2);                               // block align
    put_u16(out, 16);                              // bits per sample
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32(out, data_bytes);
    for (int16_t s : samples) put_u16(out, (uint16_t)s);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open wav for writing: " + path);
    f.write((const char*)out.data(), (std::streamsize)out.size());
    if (!f) throw IoError("write failure on wav file: " + path);
}

void write_pcm_wav(const std::string& path, const std::vector<AudioFrame>& frames) {
    int rate = frames.empty() ? kPipelineRateHz : frames.front().sample_rate_hz;
    for (const auto& f : frames) {
        if (f.sample_rate_hz != rate) {
            throw ParamError("wav write: frames with mixed sample rates");
        }
    }
    write_pcm_wav(path, concat(frames), rate);
}

}  // namespace rtva::audio
