// Copyright 2026 The degroup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "degroup/degrade.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <set>

#include "degroup/error.hpp"
#include "degroup/filter.hpp"
#include "degroup/hash.hpp"
#include "degroup/json_io.hpp"
#include "degroup/parallel.hpp"
#include "degroup/rng.hpp"

namespace degroup {

using nlohmann::json;

namespace {

struct KindName {
  DegradationKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {DegradationKind::kGaussianBlur, "gaussian_blur"},
    {DegradationKind::kMotionBlur, "motion_blur"},
    {DegradationKind::kRichardsonLucy, "rl"},
    {DegradationKind::kSuperResolution, "sr"},
    {DegradationKind::kRinging, "ringing"},
    {DegradationKind::kDefocusBlur, "defocus_blur"},
    {DegradationKind::kJpeg, "jpeg"},
    {DegradationKind::kPoissonNoise, "poisson_noise"},
    {DegradationKind::kInpainting, "inpainting"},
    {DegradationKind::kGaussianNoise, "gaussian_noise"},
    {DegradationKind::kSaltPepperNoise, "sp_noise"},
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& id, const std::string& what) {
  if (!ok) throw ValidationError("degradation '" + id + "': " + what);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::string_view to_string(DegradationKind kind) {
  for (const auto& kn : kKindNames)
    if (kn.kind == kind) return kn.name;
  return "unknown";
}

std::optional<DegradationKind> degradation_kind_from_string(std::string_view name) {
  for (const auto& kn : kKindNames)
    if (kn.name == name) return kn.kind;
  return std::nullopt;
}

DegradationKind DegradationSpec::kind() const {
  return static_cast<DegradationKind>(params.index());
}

bool DegradationSpec::stochastic() const {
  return std::visit(
      Overloaded{
          [](const MotionBlurParams& p) { return !p.angle_deg.has_value(); },
          [](const PoissonNoiseParams&) { return true; },
          [](const InpaintingParams& p) { return p.ratio > 0.0; },
          [](const GaussianNoiseParams& p) { return p.sigma > 0.0; },
          [](const SaltPepperParams& p) { return p.probability > 0.0; },
          [](const auto&) { return false; },
      },
      params);
}

void validate(const DegradationSpec& spec) {
  const std::string& id = spec.id;
  if (id.empty()) throw ValidationError("degradation id must not be empty");
  std::visit(
      Overloaded{
          [&](const GaussianBlurParams& p) {
            require(finite(p.sigma) && p.sigma > 0.0 && p.sigma <= 50.0, id, "sigma must be in (0, 50]");
          },
          [&](const MotionBlurParams& p) {
            require(finite(p.length) && p.length >= 1.0 && p.length <= 255.0, id,
                    "length must be in [1, 255]");
            require(!p.angle_deg || finite(*p.angle_deg), id, "angle must be finite");
          },
          [&](const RichardsonLucyParams& p) {
            require(finite(p.sigma) && p.sigma > 0.0 && p.sigma <= 50.0, id, "sigma must be in (0, 50]");
            require(p.iterations >= 1 && p.iterations <= 1000, id, "iterations must be in [1, 1000]");
          },
          [&](const SuperResolutionParams& p) {
            require(p.factor >= 2 && p.factor <= 8, id, "factor must be an integer in [2, 8]");
          },
          [&](const RingingParams& p) {
            require(finite(p.radius) && p.radius > 0.0 && p.radius <= 1.0, id, "radius must be in (0, 1]");
          },
          [&](const DefocusBlurParams& p) {
            require(finite(p.radius) && p.radius > 0.0 && p.radius <= 50.0, id, "radius must be in (0, 50]");
          },
          [&](const JpegParams& p) {
            require(p.quality >= 1 && p.quality <= 100, id, "quality must be in [1, 100]");
          },
          [&](const PoissonNoiseParams& p) {
            require(finite(p.peak) && p.peak > 0.0 && p.peak <= 1e6, id, "peak must be in (0, 1e6]");
          },
          [&](const InpaintingParams& p) {
            require(finite(p.ratio) && p.ratio >= 0.0 && p.ratio < 1.0, id, "ratio must be in [0, 1)");
            require(p.block >= 1, id, "block must be >= 1");
          },
          [&](const GaussianNoiseParams& p) {
            require(finite(p.sigma) && p.sigma >= 0.0 && p.sigma <= 1.0, id, "sigma must be in [0, 1]");
          },
          [&](const SaltPepperParams& p) {
            require(finite(p.probability) && p.probability >= 0.0 && p.probability < 1.0, id,
                    "p must be in [0, 1)");
          },
      },
      spec.params);
}

namespace {

class FieldReader {
 public:
  FieldReader(const json& obj, std::string id) : obj_(obj), id_(std::move(id)) {}

  double number(const char* key, double fallback) {
    used_.insert(key);
    if (!obj_.contains(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number()) throw ValidationError("degradation '" + id_ + "': '" + key + "' must be a number");
    return v.get<double>();
  }

  int integer(const char* key, int fallback) {
    const double v = number(key, fallback);
    if (v != std::floor(v) || std::fabs(v) > 1e9) {
      throw ValidationError("degradation '" + id_ + "': '" + key + "' must be an integer");
    }
    return static_cast<int>(v);
  }

  std::optional<double> optional_number(const char* key) {
    used_.insert(key);
    if (!obj_.contains(key) || obj_.at(key).is_null()) return std::nullopt;
    return number(key, 0.0);
  }

  void reject_unknown() const {
    for (const auto& [key, _] : obj_.items()) {
      if (key != "kind" && key != "id" && !used_.count(key)) {
        throw ValidationError("degradation '" + id_ + "': unknown parameter '" + key + "'");
      }
    }
  }

 private:
  const json& obj_;
  std::string id_;
  std::set<std::string> used_;
};

}  // namespace

DegradationSpec parse_degradation_spec(const json& fragment) {
  if (!fragment.is_object()) throw ValidationError("degradation spec must be a JSON object");
  if (!fragment.contains("kind") || !fragment.at("kind").is_string()) {
    throw ValidationError("degradation spec needs a string 'kind'");
  }
  const auto kind_name = fragment.at("kind").get<std::string>();
  const auto kind = degradation_kind_from_string(kind_name);
  if (!kind) throw ValidationError("unknown degradation kind '" + kind_name + "'");
  DegradationSpec spec;
  if (fragment.contains("id")) {
    if (!fragment.at("id").is_string()) throw ValidationError("degradation 'id' must be a string");
    spec.id = fragment.at("id").get<std::string>();
  } else {
    spec.id = kind_name;
  }
  FieldReader r(fragment, spec.id);
  switch (*kind) {
    case DegradationKind::kGaussianBlur: {
      GaussianBlurParams p;
      p.sigma = r.number("sigma", p.sigma);
      spec.params = p;
      break;
    }
    case DegradationKind::kMotionBlur: {
      MotionBlurParams p;
      p.length = r.number("length", p.length);
      p.angle_deg = r.optional_number("angle");
      spec.params = p;
      break;
    }
    case DegradationKind::kRichardsonLucy: {
      RichardsonLucyParams p;
      p.sigma = r.number("sigma", p.sigma);
      p.iterations = r.integer("iterations", p.iterations);
      spec.params = p;
      break;
    }
    case DegradationKind::kSuperResolution: {
      SuperResolutionParams p;
      p.factor = r.integer("factor", p.factor);
      spec.params = p;
      break;
    }
    case DegradationKind::kRinging: {
      RingingParams p;
      p.radius = r.number("radius", p.radius);
      spec.params = p;
      break;
    }
    case DegradationKind::kDefocusBlur: {
      DefocusBlurParams p;
      p.radius = r.number("radius", p.radius);
      spec.params = p;
      break;
    }
    case DegradationKind::kJpeg: {
      JpegParams p;
      p.quality = r.integer("quality", p.quality);
      spec.params = p;
      break;
    }
    case DegradationKind::kPoissonNoise: {
      PoissonNoiseParams p;
      p.peak = r.number("peak", p.peak);
      spec.params = p;
      break;
    }
    case DegradationKind::kInpainting: {
      InpaintingParams p;
      p.ratio = r.number("ratio", p.ratio);
      p.block = r.integer("block", p.block);
      spec.params = p;
      break;
    }
    case DegradationKind::kGaussianNoise: {
      GaussianNoiseParams p;
      p.sigma = r.number("sigma", p.sigma);
      spec.params = p;
      break;
    }
    case DegradationKind::kSaltPepperNoise: {
      SaltPepperParams p;
      p.probability = r.number("p", p.probability);
      spec.params = p;
      break;
    }
  }
  r.reject_unknown();
  validate(spec);
  return spec;
}

DegradationSpec parse_degradation_spec(std::string_view text) {
  return parse_degradation_spec(parse_json_strict(text));
}

json to_json(const DegradationSpec& spec) {
  json j{{"kind", std::string(to_string(spec.kind()))}, {"id", spec.id}};
  std::visit(Overloaded{
                 [&](const GaussianBlurParams& p) { j["sigma"] = p.sigma; },
                 [&](const MotionBlurParams& p) {
                   j["length"] = p.length;
                   if (p.angle_deg) j["angle"] = *p.angle_deg;
                 },
                 [&](const RichardsonLucyParams& p) {
                   j["sigma"] = p.sigma;
                   j["iterations"] = p.iterations;
                 },
                 [&](const SuperResolutionParams& p) { j["factor"] = p.factor; },
                 [&](const RingingParams& p) { j["radius"] = p.radius; },
                 [&](const DefocusBlurParams& p) { j["radius"] = p.radius; },
                 [&](const JpegParams& p) { j["quality"] = p.quality; },
                 [&](const PoissonNoiseParams& p) { j["peak"] = p.peak; },
                 [&](const InpaintingParams& p) {
                   j["ratio"] = p.ratio;
                   j["block"] = p.block;
                 },
                 [&](const GaussianNoiseParams& p) { j["sigma"] = p.sigma; },
                 [&](const SaltPepperParams& p) { j["p"] = p.probability; },
             },
             spec.params);
  return j;
}

std::vector<DegradationSpec> parse_suite(const json& array) {
  if (!array.is_array() || array.empty()) {
    throw ValidationError("degradation suite must be a non-empty JSON array");
  }
  std::vector<DegradationSpec> suite;
  std::set<std::string> ids;
  for (const auto& item : array) {
    suite.push_back(parse_degradation_spec(item));
    if (!ids.insert(suite.back().id).second) {
      throw ValidationError("duplicate degradation id '" + suite.back().id + "' in suite");
    }
  }
  return suite;
}

std::vector<DegradationSpec> load_suite(const std::filesystem::path& path) {
  return parse_suite(read_json_file(path));
}

// ---------------------------------------------------------------------------
// Operators

namespace {

double keys_cubic(double x) {
  x = std::fabs(x);
  if (x <= 1.0) return (1.5 * x - 2.5) * x * x + 1.0;
  if (x < 2.0) return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
  return 0.0;
}

struct ResampleTap {
  std::vector<std::size_t> index;
  std::vector<double> weight;
};

std::vector<ResampleTap> resample_weights(std::size_t in, std::size_t out) {
  const double scale = static_cast<double>(out) / static_cast<double>(in);
  const double kernel_scale = std::min(scale, 1.0);
  const double support = 2.0 / kernel_scale;
  std::vector<ResampleTap> taps(out);
  for (std::size_t i = 0; i < out; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / scale - 0.5;
    const auto first = static_cast<std::ptrdiff_t>(std::floor(u - support));
    const auto last = static_cast<std::ptrdiff_t>(std::ceil(u + support));
    double total = 0.0;
    for (std::ptrdiff_t j = first; j <= last; ++j) {
      const double w = kernel_scale * keys_cubic(kernel_scale * (u - static_cast<double>(j)));
      if (w == 0.0) continue;
      taps[i].index.push_back(reflect_index(j, in));
      taps[i].weight.push_back(w);
      total += w;
    }
    for (double& w : taps[i].weight) w /= total;
  }
  return taps;
}

Plane resample_rows(const Plane& plane, std::size_t out_width) {
  const auto taps = resample_weights(plane.width, out_width);
  Plane out(plane.height, out_width);
  for (std::size_t y = 0; y < plane.height; ++y) {
    const double* row = plane.data.data() + y * plane.width;
    for (std::size_t x = 0; x < out_width; ++x) {
      double s = 0.0;
      for (std::size_t k = 0; k < taps[x].index.size(); ++k) s += taps[x].weight[k] * row[taps[x].index[k]];
      out.at(y, x) = s;
    }
  }
  return out;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

Plane richardson_lucy(const Plane& clean, const RichardsonLucyParams& p) {
  const auto taps = kernels::gaussian_1d(p.sigma);
  const auto blur = [&](const Plane& x) { return correlate_separable(x, taps, taps); };
  const Plane observed = blur(clean);
  Plane estimate = observed;
  constexpr double kFloor = 1e-12;
  for (int it = 0; it < p.iterations; ++it) {
    const Plane reblurred = blur(estimate);
    Plane ratio(observed.height, observed.width);
    for (std::size_t i = 0; i < ratio.data.size(); ++i) {
      ratio.data[i] = observed.data[i] / std::max(reblurred.data[i], kFloor);
    }
    const Plane correction = blur(ratio);
    for (std::size_t i = 0; i < estimate.data.size(); ++i) estimate.data[i] *= correction.data[i];
  }
  return estimate;
}

Image inpaint(const Image& image, const InpaintingParams& p, CounterRng& rng) {
  if (p.ratio <= 0.0) return image;
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  const auto block_h = std::min<std::size_t>(static_cast<std::size_t>(p.block), h);
  const auto block_w = std::min<std::size_t>(static_cast<std::size_t>(p.block), w);
  const auto target = static_cast<std::size_t>(std::llround(p.ratio * static_cast<double>(h * w)));
  std::vector<unsigned char> mask(h * w, 0);
  std::size_t covered = 0;
  // Blocks overlap, so cap the number of draws; coverage converges long before.
  const std::size_t max_draws = 64 * (h * w / (block_h * block_w) + 1);
  for (std::size_t draw = 0; draw < max_draws && covered < target; ++draw) {
    const std::size_t top = rng.below(h - block_h + 1);
    const std::size_t left = rng.below(w - block_w + 1);
    for (std::size_t y = top; y < top + block_h; ++y) {
      for (std::size_t x = left; x < left + block_w; ++x) {
        if (!mask[y * w + x]) {
          mask[y * w + x] = 1;
          ++covered;
        }
      }
    }
  }
  Image out = image;
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      if (mask[y * w + x])
        for (std::size_t c = 0; c < image.channels(); ++c) out.set(y, x, c, 0.0);
  return out;
}

}  // namespace

Plane resize_bicubic(const Plane& plane, std::size_t out_height, std::size_t out_width) {
  if (out_height == 0 || out_width == 0 || plane.data.empty()) throw ShapeError("resize: empty size");
  return transpose(resample_rows(transpose(resample_rows(plane, out_width)), out_height));
}

Plane ideal_lowpass(const Plane& plane, double radius) {
  const std::size_t h = plane.height;
  const std::size_t w = plane.width;
  const std::size_t n = h * w;
  std::unique_ptr<fftw_complex, FftwFree> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
  fftw_plan forward;
  fftw_plan backward;
  {
    std::lock_guard lock(fftw_planner_mutex());
    forward = fftw_plan_dft_2d(static_cast<int>(h), static_cast<int>(w), buf.get(), buf.get(),
                               FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_2d(static_cast<int>(h), static_cast<int>(w), buf.get(), buf.get(),
                                FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) {
    buf.get()[i][0] = plane.data[i];
    buf.get()[i][1] = 0.0;
  }
  fftw_execute(forward);
  for (std::size_t ky = 0; ky < h; ++ky) {
    const double fy = (ky <= h / 2 ? static_cast<double>(ky) : static_cast<double>(ky) - static_cast<double>(h)) /
                      static_cast<double>(h);
    for (std::size_t kx = 0; kx < w; ++kx) {
      const double fx =
          (kx <= w / 2 ? static_cast<double>(kx) : static_cast<double>(kx) - static_cast<double>(w)) /
          static_cast<double>(w);
      // Frequencies in cycles/pixel; Nyquist is 0.5.
      if (std::hypot(fy, fx) > 0.5 * radius) {
        buf.get()[ky * w + kx][0] = 0.0;
        buf.get()[ky * w + kx][1] = 0.0;
      }
    }
  }
  fftw_execute(backward);
  Plane out(h, w);
  for (std::size_t i = 0; i < n; ++i) out.data[i] = buf.get()[i][0] / static_cast<double>(n);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  return out;
}

Image apply_degradation(const Image& image, const DegradationSpec& spec, std::uint64_t seed,
                        std::uint64_t image_index) {
  if (image.empty()) throw ShapeError("apply_degradation: empty image");
  validate(spec);
  CounterRng rng(seed, stream_id(spec.id, image_index));

  return std::visit(
      Overloaded{
          [&](const GaussianBlurParams& p) {
            const auto taps = kernels::gaussian_1d(p.sigma);
            return map_channels(image, [&](const Plane& x) { return correlate_separable(x, taps, taps); });
          },
          [&](const MotionBlurParams& p) {
            const double angle = p.angle_deg ? *p.angle_deg : 180.0 * rng.uniform();
            const Kernel2d k = kernels::motion(p.length, angle);
            return map_channels(image, [&](const Plane& x) { return convolve(x, k); });
          },
          [&](const RichardsonLucyParams& p) {
            return map_channels(image, [&](const Plane& x) { return richardson_lucy(x, p); });
          },
          [&](const SuperResolutionParams& p) {
            const auto f = static_cast<double>(p.factor);
            const auto lh = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(image.height() / f)));
            const auto lw = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(image.width() / f)));
            return map_channels(image, [&](const Plane& x) {
              return resize_bicubic(resize_bicubic(x, lh, lw), image.height(), image.width());
            });
          },
          [&](const RingingParams& p) {
            return map_channels(image, [&](const Plane& x) { return ideal_lowpass(x, p.radius); });
          },
          [&](const DefocusBlurParams& p) {
            const Kernel2d k = kernels::disk(p.radius);
            return map_channels(image, [&](const Plane& x) { return convolve(x, k); });
          },
          [&](const JpegParams& p) { return jpeg_roundtrip(image, p.quality); },
          [&](const PoissonNoiseParams& p) {
            std::vector<double> out(image.samples().begin(), image.samples().end());
            for (double& v : out) v = static_cast<double>(rng.poisson(v * p.peak)) / p.peak;
            return Image::from_samples(image.height(), image.width(), image.channels(), std::move(out));
          },
          [&](const InpaintingParams& p) { return inpaint(image, p, rng); },
          [&](const GaussianNoiseParams& p) {
            if (p.sigma == 0.0) return image;
            std::vector<double> out(image.samples().begin(), image.samples().end());
            for (double& v : out) v += p.sigma * rng.normal();
            return Image::from_samples(image.height(), image.width(), image.channels(), std::move(out));
          },
          [&](const SaltPepperParams& p) {
            if (p.probability == 0.0) return image;
            Image out = image;
            for (std::size_t y = 0; y < image.height(); ++y) {
              for (std::size_t x = 0; x < image.width(); ++x) {
                if (rng.uniform() >= p.probability) continue;
                const double value = rng.uniform() < 0.5 ? 0.0 : 1.0;
                for (std::size_t c = 0; c < image.channels(); ++c) out.set(y, x, c, value);
              }
            }
            return out;
          },
      },
      spec.params);
}

// ---------------------------------------------------------------------------
// Corpus

std::vector<std::filesystem::path> list_corpus_images(const std::filesystem::path& corpus_dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(corpus_dir, ec)) {
    throw FileError("corpus directory not found: " + corpus_dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

CorpusManifest degrade_corpus(const std::filesystem::path& corpus_dir,
                              const std::vector<DegradationSpec>& suite, std::uint64_t seed,
                              const std::filesystem::path& out_dir, unsigned workers) {
  const auto sources = list_corpus_images(corpus_dir);
  if (sources.empty()) throw DataError("corpus is empty: " + corpus_dir.string());
  if (suite.empty()) throw ValidationError("degradation suite is empty");
  std::set<std::string> ids;
  for (const auto& spec : suite) {
    validate(spec);
    if (!ids.insert(spec.id).second) throw ValidationError("duplicate degradation id '" + spec.id + "'");
  }
  std::error_code ec;
  for (const auto& spec : suite) {
    std::filesystem::create_directories(out_dir / spec.id, ec);
    if (ec) throw FileError("cannot create " + (out_dir / spec.id).string() + ": " + ec.message());
  }

  std::vector<Image> images;
  images.reserve(sources.size());
  for (const auto& src : sources) images.push_back(load_image(src));

  const std::size_t total = sources.size() * suite.size();
  CorpusManifest manifest;
  manifest.entries.resize(total);
  parallel_for(total, workers, [&](std::size_t job) {
    const std::size_t i = job / suite.size();
    const DegradationSpec& spec = suite[job % suite.size()];
    const Image degraded = apply_degradation(images[i], spec, seed, i);
    const auto out_path = out_dir / spec.id / (sources[i].stem().string() + ".png");
    save_image(degraded, out_path);
    manifest.entries[job] =
        ManifestEntry{sources[i].string(), spec.id, seed, out_path.string(), file_checksum(out_path)};
  });

  json suite_echo = json::array();
  for (const auto& spec : suite) suite_echo.push_back(to_json(spec));
  manifest.header = artifact_header();
  manifest.header["jpeg_encoder"] = jpeg_encoder_identity();
  manifest.header["seed"] = seed;
  manifest.header["corpus_dir"] = corpus_dir.string();
  manifest.header["suite"] = suite_echo;
  return manifest;
}

json to_json(const CorpusManifest& manifest) {
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"source", e.source},
                       {"degradation", e.degradation},
                       {"seed", e.seed},
                       {"output", e.output},
                       {"checksum", e.checksum}});
  }
  json doc = manifest.header.is_object() ? manifest.header : json::object();
  doc["entries"] = std::move(entries);
  return doc;
}

CorpusManifest manifest_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("entries") || !doc.at("entries").is_array()) {
    throw FormatError("manifest must be an object with an 'entries' array");
  }
  CorpusManifest manifest;
  manifest.header = doc;
  manifest.header.erase("entries");
  std::set<std::tuple<std::string, std::string, std::uint64_t>> seen;
  for (const auto& e : doc.at("entries")) {
    ManifestEntry entry;
    try {
      entry.source = e.at("source").get<std::string>();
      entry.degradation = e.at("degradation").get<std::string>();
      entry.seed = e.at("seed").get<std::uint64_t>();
      entry.output = e.at("output").get<std::string>();
      entry.checksum = e.at("checksum").get<std::string>();
    } catch (const json::exception& ex) {
      throw FormatError(std::string("malformed manifest entry: ") + ex.what());
    }
    if (entry.checksum.empty()) throw FormatError("manifest entry without checksum: " + entry.output);
    if (!seen.emplace(entry.source, entry.degradation, entry.seed).second) {
      throw FormatError("duplicate manifest entry for " + entry.source + " / " + entry.degradation);
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

}  // namespace degroup
