//! Built-in experiment configurations, one per reproduced figure panel.
//!
//! All presets use M = 64 subcarriers at 15 kHz and the Hermite prototype
//! with overlap K = 4 unless the panel compares filters.

pub const NAMES: [&str; 6] = ["fig3a", "fig3b", "fig3c", "fig4a", "fig4b", "fig4c"];

const FIG3A: &str = r#"# PAPR CCDF of every waveform, Hermite K = 4, 4-QAM.
name = "fig3a"
experiment = "papr"
seed = 20160301
waveforms = ["fbmc_oqam", "simple_dft_s1", "simple_dft_s2", "map_dft", "scfdma", "ofdm"]
constellations = [4]

[lattice]
subcarriers = 64
spacing_hz = 15000.0
oversampling = 4

[burst]
slots = 64
cp_len = 0

[[filter]]
kind = "hermite"
overlap = 4

[papr]
windows = 200000
"#;

const FIG3B: &str = r#"# PAPR CCDF of map-DFT-spread FBMC under different prototype filters.
name = "fig3b"
experiment = "papr"
seed = 20160302
waveforms = ["map_dft", "scfdma", "ofdm"]
constellations = [4]

[lattice]
subcarriers = 64
spacing_hz = 15000.0
oversampling = 4

[burst]
slots = 64
cp_len = 0

[[filter]]
kind = "phydyas"
overlap = 4

[[filter]]
kind = "iota"
overlap = 4

[[filter]]
kind = "rrc"
overlap = 4
roll_off = 1.0

[[filter]]
kind = "egf"
overlap = 4
alpha = 6.0

[[filter]]
kind = "hermite"
overlap = 4

[papr]
windows = 200000
"#;

const FIG3C: &str = r#"# Power spectral density for the same filters as fig3b.
name = "fig3c"
experiment = "psd"
seed = 20160303
waveforms = ["map_dft", "scfdma", "ofdm"]
constellations = [4]

[lattice]
subcarriers = 64
spacing_hz = 15000.0
oversampling = 4

[burst]
slots = 64
cp_len = 0

[[filter]]
kind = "phydyas"
overlap = 4

[[filter]]
kind = "iota"
overlap = 4

[[filter]]
kind = "rrc"
overlap = 4
roll_off = 1.0

[[filter]]
kind = "egf"
overlap = 4
alpha = 6.0

[[filter]]
kind = "hermite"
overlap = 4

[psd]
bursts = 256
segment = 4096
overlap = 0.5
"#;

const FIG4A: &str = r#"# Bit error probability over AWGN, 4-QAM.
name = "fig4a"
experiment = "ber"
seed = 20160401
waveforms = ["fbmc_oqam", "map_dft", "scfdma", "ofdm"]
constellations = [4]

[lattice]
subcarriers = 64
spacing_hz = 15000.0
oversampling = 4

[burst]
slots = 32
guard_slots = 4

[[filter]]
kind = "hermite"
overlap = 4

[channel]
profile = "awgn"

[ber]
snr_db = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0]
max_bits = 4000000
target_errors = 400
"#;

const FIG4B: &str = r#"# Bit error probability over Pedestrian A at 5 Hz Doppler, 4-QAM.
name = "fig4b"
experiment = "ber"
seed = 20160402
waveforms = ["fbmc_oqam", "map_dft", "scfdma", "ofdm"]
constellations = [4]

[lattice]
subcarriers = 64
spacing_hz = 15000.0
oversampling = 4

[burst]
slots = 32
guard_slots = 4

[[filter]]
kind = "hermite"
overlap = 4

[channel]
profile = "pedestrian_a"
doppler_hz = 5.0

[ber]
snr_db = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0, 22.0, 24.0, 26.0, 28.0, 30.0]
# A fixed budget: every waveform sees the same channel and noise draws.
min_bits = 1000000
max_bits = 1000000
target_errors = 1000
"#;

const FIG4C: &str = r#"# Bit error probability over Vehicular A at 185 Hz Doppler, 4-QAM and 64-QAM.
name = "fig4c"
experiment = "ber"
seed = 20160403
waveforms = ["fbmc_oqam", "map_dft", "scfdma", "ofdm"]
constellations = [4, 64]

[lattice]
subcarriers = 64
spacing_hz = 15000.0
oversampling = 4

[burst]
slots = 32
guard_slots = 4

[[filter]]
kind = "hermite"
overlap = 4

[channel]
profile = "vehicular_a"
doppler_hz = 185.0

[ber]
snr_db = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0, 22.0, 24.0, 26.0, 28.0, 30.0]
# A fixed budget: every waveform sees the same channel and noise draws.
min_bits = 1000000
max_bits = 1000000
target_errors = 1000
"#;

/// TOML text of the named preset.
pub fn preset(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig3a" => FIG3A,
        "fig3b" => FIG3B,
        "fig3c" => FIG3C,
        "fig4a" => FIG4A,
        "fig4b" => FIG4B,
        "fig4c" => FIG4C,
        _ => return None,
    })
}
