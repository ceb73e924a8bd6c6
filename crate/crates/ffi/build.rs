use std::path::PathBuf;

fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR");
    let out = PathBuf::from(&crate_dir).join("include").join("pconc.h");
    std::fs::create_dir_all(out.parent().unwrap()).expect("create include dir");

    let mut config = cbindgen::Config {
        language: cbindgen::Language::C,
        include_guard: Some("PCONC_H".into()),
        cpp_compat: true,
        usize_is_size_t: true,
        documentation: true,
        sys_includes: vec!["stdbool.h".into(), "stddef.h".into(), "stdint.h".into()],
        no_includes: true,
        ..Default::default()
    };
    config.enumeration.rename_variants = cbindgen::RenameRule::ScreamingSnakeCase;
    config.enumeration.prefix_with_name = true;

    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("generate C header")
        .write_to_file(out);

    println!("cargo:rerun-if-changed=src/lib.rs");
}
