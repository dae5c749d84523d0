use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Scaffold;
use crate::error::{LiftError, Result};

pub const SCAFFOLD_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    target: String,
    big_m: f64,
    sigma: f64,
    lambda: f64,
    q: usize,
    c0: f64,
    c1: f64,
}

#[derive(Serialize, Deserialize)]
struct File {
    header: Header,
    body: Scaffold,
}

pub fn save_scaffold(s: &Scaffold, path: &Path) -> Result<()> {
    let file = File {
        header: Header {
            format: "liftbv-scaffold".into(),
            version: SCAFFOLD_FORMAT_VERSION,
            target: s.target_id().to_string(),
            big_m: s.big_m(),
            sigma: s.sigma(),
            lambda: s.lambda(),
            q: s.q(),
            c0: s.constants.c0,
            c1: s.constants.c1,
        },
        body: s.clone(),
    };
    fs::write(path, serde_json::to_string(&file)?)?;
    Ok(())
}

pub fn load_scaffold(path: &Path) -> Result<Scaffold> {
    let text = fs::read_to_string(path)?;
    let file: File = serde_json::from_str(&text)?;
    if file.header.version != SCAFFOLD_FORMAT_VERSION {
        return Err(LiftError::InvalidArgument(format!(
            "scaffold format version {} is not supported",
            file.header.version
        )));
    }
    let mut s = file.body;
    s.rehydrate()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaffold::build_generic_scaffold;

    #[test]
    fn round_trip() {
        let s = build_generic_scaffold("circle", 8, 2.0, Some(0.25)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.json");
        save_scaffold(&s, &p).unwrap();
        let back = load_scaffold(&p).unwrap();
        assert_eq!(back.w_cubes(), s.w_cubes());
        assert_eq!(back.members(), s.members());
        let z = [0.37, -0.81];
        assert_eq!(back.rho(&z).unwrap(), s.rho(&z).unwrap());
    }
}
