fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let crate_dir = std::env::var("CARGO_MANIFEST_DIR")?;
    let bindings = cbindgen::generate(&crate_dir)?;
    bindings.write_to_file(format!("{crate_dir}/include/qwflow.h"));

    Ok(())
}
