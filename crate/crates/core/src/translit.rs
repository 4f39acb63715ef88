//! Arabic script to Buckwalter transliteration.
//!
//! Uses the XML-safe Buckwalter variant (`O` for hamza-above alef, `I` for
//! hamza-below alef, `W` for hamza on waw) so transliterated tokens never
//! need escaping. Every Arabic character maps to exactly one ASCII
//! character, so character offsets into the original text are preserved.
//! Characters outside the table pass through unchanged.

/// Transliterates a single character.
pub fn to_buckwalter_char(c: char) -> char {
    match c {
        '\u{0621}' => '\'', // ء
        '\u{0622}' => '|',  // آ
        '\u{0623}' => 'O',  // أ
        '\u{0624}' => 'W',  // ؤ
        '\u{0625}' => 'I',  // إ
        '\u{0626}' => '}',  // ئ
        '\u{0627}' => 'A',  // ا
        '\u{0628}' => 'b',  // ب
        '\u{0629}' => 'p',  // ة
        '\u{062A}' => 't',  // ت
        '\u{062B}' => 'v',  // ث
        '\u{062C}' => 'j',  // ج
        '\u{062D}' => 'H',  // ح
        '\u{062E}' => 'x',  // خ
        '\u{062F}' => 'd',  // د
        '\u{0630}' => '*',  // ذ
        '\u{0631}' => 'r',  // ر
        '\u{0632}' => 'z',  // ز
        '\u{0633}' => 's',  // س
        '\u{0634}' => '$',  // ش
        '\u{0635}' => 'S',  // ص
        '\u{0636}' => 'D',  // ض
        '\u{0637}' => 'T',  // ط
        '\u{0638}' => 'Z',  // ظ
        '\u{0639}' => 'E',  // ع
        '\u{063A}' => 'g',  // غ
        '\u{0640}' => '_',  // tatweel
        '\u{0641}' => 'f',  // ف
        '\u{0642}' => 'q',  // ق
        '\u{0643}' => 'k',  // ك
        '\u{0644}' => 'l',  // ل
        '\u{0645}' => 'm',  // م
        '\u{0646}' => 'n',  // ن
        '\u{0647}' => 'h',  // ه
        '\u{0648}' => 'w',  // و
        '\u{0649}' => 'Y',  // ى
        '\u{064A}' => 'y',  // ي
        '\u{064B}' => 'F',  // fathatan
        '\u{064C}' => 'N',  // dammatan
        '\u{064D}' => 'K',  // kasratan
        '\u{064E}' => 'a',  // fatha
        '\u{064F}' => 'u',  // damma
        '\u{0650}' => 'i',  // kasra
        '\u{0651}' => '~',  // shadda
        '\u{0652}' => 'o',  // sukun
        '\u{0670}' => '`',  // dagger alef
        '\u{0671}' => '{',  // alef wasla
        '\u{067E}' => 'P',  // پ
        '\u{0686}' => 'J',  // چ
        '\u{06A4}' => 'V',  // ڤ
        '\u{06AF}' => 'G',  // گ
        c => c,
    }
}

pub fn is_arabic(c: char) -> bool {
    matches!(c, '\u{0600}'..='\u{06FF}')
}

/// Transliterates a whole string, one output character per input character.
pub fn to_buckwalter(text: &str) -> String {
    text.chars().map(to_buckwalter_char).collect()
}
