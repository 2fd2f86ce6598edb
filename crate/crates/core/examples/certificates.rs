//! A Holds verdict carries a certificate that replays without searching; edits are caught.

use procat::deciders::{check_system, Certificate, Property};
use procat::gallery::scenarios::z8_nilpotent;

fn main() {
    let v = check_system(Property::Stable, &z8_nilpotent(), 12).unwrap();
    let cert = v.certificate().expect("the nilpotent tower is stable").clone();
    let json = cert.to_json();
    println!("{} bytes, {} entries, digest {}", json.len(), cert.entries.len(), &cert.digest[..16]);

    let back = Certificate::from_json(&json).unwrap();
    println!("replay: {:?}", back.verify());

    let mut edited = back.clone();
    edited.horizon += 1;
    println!("edited horizon: {}", edited.verify().unwrap_err());

    // Resealing hides the edit from the digest, but not from replay.
    let mut forged = back;
    forged.entries.clear();
    forged.reseal();
    match forged.verify() {
        Ok(()) => println!("forged certificate accepted"),
        Err(e) => println!("forged certificate rejected by {}: {}", e.caught_by(), e),
    }
}
