use firescene::ifd::Endian;
use firescene::raw::{decode_raw, load_raw_raster, write_raw_raster, ByteOrder, Dtype, RawHeader};
use firescene::tiff::{
    decode_thermal_tiff, encode_raster, encode_tiff, Calibration, Samples, TiffOptions,
    TiffWriteOptions,
};
use firescene_core::ThermalRaster;
use proptest::prelude::*;

fn raster() -> impl Strategy<Value = ThermalRaster> {
    (1usize..24, 1usize..24).prop_flat_map(|(w, h)| {
        (
            proptest::collection::vec(-40.0f32..1200.0, w * h),
            proptest::collection::vec(proptest::bool::weighted(0.9), w * h),
        )
            .prop_map(move |(t, m)| {
                ThermalRaster::from_parts(w, h, t.into_iter().map(f64::from).collect(), m).unwrap()
            })
    })
}

fn endian() -> impl Strategy<Value = Endian> {
    prop_oneof![Just(Endian::Little), Just(Endian::Big)]
}

fn assert_same(a: &ThermalRaster, b: &ThermalRaster) {
    assert_eq!((a.width(), a.height()), (b.width(), b.height()));
    assert_eq!(a.valid_mask(), b.valid_mask());
    for (i, t) in a.valid_pixels() {
        assert_eq!(t, b.temps()[i]);
    }
}

proptest! {
    #[test]
    fn float_tiff_round_trip(
        r in raster(),
        endian in endian(),
        deflate in any::<bool>(),
        rows_per_strip in 1usize..30,
    ) {
        let opts = TiffWriteOptions { endian, deflate, rows_per_strip, nodata: Some(-9999.0) };
        let back = decode_thermal_tiff(&encode_raster(&r, &opts), &TiffOptions::default()).unwrap();
        assert_same(&r, &back);
    }

    #[test]
    fn integer_tiff_applies_calibration(
        samples in proptest::collection::vec(7000u16..30000, 1..200),
        endian in endian(),
        deflate in any::<bool>(),
    ) {
        let w = samples.len();
        let opts = TiffWriteOptions { endian, deflate, ..Default::default() };
        let bytes = encode_tiff(w, 1, &Samples::U16(samples.clone()), &opts);
        let cal = TiffOptions {
            calibration: Calibration { scale: 0.04, offset: -273.15 },
            nodata: None,
        };
        let r = decode_thermal_tiff(&bytes, &cal).unwrap();
        for (s, t) in samples.iter().zip(r.temps()) {
            prop_assert!((f64::from(*s) * 0.04 - 273.15 - t).abs() < 1e-9);
        }
    }

    #[test]
    fn truncated_tiff_is_an_error(r in raster(), endian in endian(), cut in 0.0f64..1.0) {
        let opts = TiffWriteOptions { endian, ..Default::default() };
        let bytes = encode_raster(&r, &opts);
        let keep = (bytes.len() as f64 * cut) as usize;
        prop_assert!(decode_thermal_tiff(&bytes[..keep], &TiffOptions::default()).is_err());
    }

    #[test]
    fn corrupted_tiff_never_panics(r in raster(), flips in proptest::collection::vec((any::<usize>(), any::<u8>()), 1..8)) {
        let mut bytes = encode_raster(&r, &TiffWriteOptions::default());
        let n = bytes.len();
        for (at, v) in flips {
            bytes[at % n] = v;
        }
        let _ = decode_thermal_tiff(&bytes, &TiffOptions::default());
    }

    #[test]
    fn raw_sidecar_round_trip(r in raster()) {
        let dir = tempfile::tempdir().unwrap();
        let sidecar = write_raw_raster(&r, dir.path(), "frame").unwrap();
        assert_same(&r, &load_raw_raster(&sidecar).unwrap());
    }

    #[test]
    fn raw_int16_big_endian(samples in proptest::collection::vec(-400i16..12000, 1..100)) {
        let header = RawHeader {
            width: samples.len(),
            height: 1,
            dtype: Dtype::Int16,
            endian: ByteOrder::Big,
            nodata: None,
            scale: Some(0.1),
            offset: None,
            data: None,
        };
        let bytes: Vec<u8> = samples.iter().flat_map(|s| s.to_be_bytes()).collect();
        let r = decode_raw(&header, &bytes).unwrap();
        for (s, t) in samples.iter().zip(r.temps()) {
            prop_assert!((f64::from(*s) * 0.1 - t).abs() < 1e-9);
        }
    }
}

#[test]
fn raw_size_mismatch_is_reported() {
    let header = RawHeader {
        width: 4,
        height: 4,
        dtype: Dtype::Float32,
        endian: ByteOrder::Little,
        nodata: None,
        scale: None,
        offset: None,
        data: None,
    };
    assert!(decode_raw(&header, &[0; 60]).is_err());
}

#[test]
fn non_tiff_bytes_are_rejected() {
    for bytes in [&b""[..], b"II", b"II+\0\x08\0\0\0", b"GIF89a........"] {
        assert!(decode_thermal_tiff(bytes, &TiffOptions::default()).is_err());
    }
}
