//! CRC-8 (poly 0x07, init 0x00, no reflection, no final XOR), also known
//! as CRC-8/SMBUS.

const POLY: u8 = 0x07;

const TABLE: [u8; 256] = {
    let mut table = [0u8; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = i as u8;
        let mut bit = 0;
        while bit < 8 {
            crc = if crc & 0x80 != 0 {
                (crc << 1) ^ POLY
            } else {
                crc << 1
            };
            bit += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
};

pub fn crc8(data: &[u8]) -> u8 {
    data.iter().fold(0u8, |crc, &b| TABLE[(crc ^ b) as usize])
}
