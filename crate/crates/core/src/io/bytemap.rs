use std::sync::OnceLock;

/// The reversible byte-to-code-point rendering used by byte-level BPE files.
///
/// Printable ASCII and printable Latin-1 bytes map to themselves. The other
/// 68 bytes are relocated, in increasing byte order, to U+0100..=U+0143.
#[derive(Debug)]
pub struct ByteUnicodeMap {
    forward: [char; 256],
    inverse: [Option<u8>; 324],
}

fn is_fixed(b: u8) -> bool {
    matches!(b, 0x21..=0x7E | 0xA1..=0xAC | 0xAE..=0xFF)
}

impl ByteUnicodeMap {
    fn build() -> Self {
        let mut forward = ['\0'; 256];
        let mut inverse = [None; 324];
        let mut next = 256u32;
        for b in 0..=255u8 {
            let cp = if is_fixed(b) {
                u32::from(b)
            } else {
                next += 1;
                next - 1
            };
            let ch = char::from_u32(cp).expect("code points below 0x144 are valid");
            forward[b as usize] = ch;
            inverse[cp as usize] = Some(b);
        }
        Self { forward, inverse }
    }

    pub fn byte_to_char(&self, b: u8) -> char {
        self.forward[b as usize]
    }

    pub fn char_to_byte(&self, c: char) -> Option<u8> {
        self.inverse.get(c as usize).copied().flatten()
    }

    /// Renders raw token bytes as the printable string stored in model files.
    pub fn render(&self, bytes: &[u8]) -> String {
        bytes.iter().map(|&b| self.byte_to_char(b)).collect()
    }

    /// Inverse of [`render`](Self::render). Returns the first character that
    /// is not part of the map on failure.
    pub fn parse(&self, rendered: &str) -> Result<Vec<u8>, char> {
        rendered
            .chars()
            .map(|c| self.char_to_byte(c).ok_or(c))
            .collect()
    }
}

/// The process-wide byte map.
pub fn byte_unicode_map() -> &'static ByteUnicodeMap {
    static MAP: OnceLock<ByteUnicodeMap> = OnceLock::new();
    MAP.get_or_init(ByteUnicodeMap::build)
}
