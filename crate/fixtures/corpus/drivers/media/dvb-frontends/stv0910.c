/*
 * Driver for the STV0910 DVB-S/S2 demodulator.
 */

#include <linux/kernel.h>
#include <linux/i2c.h>

static int i2c_read_regs16(struct i2c_adapter *adapter, u8 adr,
			   u16 reg, u8 *val, int count)
{
	u8 msg[2] = { reg >> 8, reg & 0xff };
	struct i2c_msg msgs[2] = {
		{ .addr = adr, .flags = 0, .buf = msg, .len = 2 },
		{ .addr = adr, .flags = I2C_M_RD, .buf = val, .len = count },
	};

	if (i2c_transfer(adapter, msgs, 2) != 2)
		return -EIO;
	return 0;
}

/* read one demodulator register; returns 0 on success, -EIO otherwise */
static int read_reg(struct stv *state, u16 reg, u8 *val)
{
	return i2c_read_regs16(state->base->i2c, state->base->adr, reg, val, 1);
}
/* register map (excerpt):
 *   RSTV0910_REG_PAD0 = 0xf0ff
 *   RSTV0910_REG_0000 = 0xf100
 *   RSTV0910_REG_0001 = 0xf101
 *   RSTV0910_REG_0002 = 0xf102
 *   RSTV0910_REG_0003 = 0xf103
 *   RSTV0910_REG_0004 = 0xf104
 *   RSTV0910_REG_0005 = 0xf105
 *   RSTV0910_REG_0006 = 0xf106
 *   RSTV0910_REG_0007 = 0xf107
 *   RSTV0910_REG_0008 = 0xf108
 *   RSTV0910_REG_0009 = 0xf109
 *   RSTV0910_REG_0010 = 0xf10a
 *   RSTV0910_REG_0011 = 0xf10b
 *   RSTV0910_REG_0012 = 0xf10c
 *   RSTV0910_REG_0013 = 0xf10d
 *   RSTV0910_REG_0014 = 0xf10e
 *   RSTV0910_REG_0015 = 0xf10f
 *   RSTV0910_REG_0016 = 0xf110
 *   RSTV0910_REG_0017 = 0xf111
 *   RSTV0910_REG_0018 = 0xf112
 *   RSTV0910_REG_0019 = 0xf113
 *   RSTV0910_REG_0020 = 0xf114
 *   RSTV0910_REG_0021 = 0xf115
 *   RSTV0910_REG_0022 = 0xf116
 *   RSTV0910_REG_0023 = 0xf117
 *   RSTV0910_REG_0024 = 0xf118
 *   RSTV0910_REG_0025 = 0xf119
 *   RSTV0910_REG_0026 = 0xf11a
 *   RSTV0910_REG_0027 = 0xf11b
 *   RSTV0910_REG_0028 = 0xf11c
 *   RSTV0910_REG_0029 = 0xf11d
 *   RSTV0910_REG_0030 = 0xf11e
 *   RSTV0910_REG_0031 = 0xf11f
 *   RSTV0910_REG_0032 = 0xf120
 *   RSTV0910_REG_0033 = 0xf121
 *   RSTV0910_REG_0034 = 0xf122
 *   RSTV0910_REG_0035 = 0xf123
 *   RSTV0910_REG_0036 = 0xf124
 *   RSTV0910_REG_0037 = 0xf125
 *   RSTV0910_REG_0038 = 0xf126
 *   RSTV0910_REG_0039 = 0xf127
 *   RSTV0910_REG_0040 = 0xf128
 *   RSTV0910_REG_0041 = 0xf129
 *   RSTV0910_REG_0042 = 0xf12a
 *   RSTV0910_REG_0043 = 0xf12b
 *   RSTV0910_REG_0044 = 0xf12c
 *   RSTV0910_REG_0045 = 0xf12d
 *   RSTV0910_REG_0046 = 0xf12e
 *   RSTV0910_REG_0047 = 0xf12f
 *   RSTV0910_REG_0048 = 0xf130
 *   RSTV0910_REG_0049 = 0xf131
 *   RSTV0910_REG_0050 = 0xf132
 *   RSTV0910_REG_0051 = 0xf133
 *   RSTV0910_REG_0052 = 0xf134
 *   RSTV0910_REG_0053 = 0xf135
 *   RSTV0910_REG_0054 = 0xf136
 *   RSTV0910_REG_0055 = 0xf137
 *   RSTV0910_REG_0056 = 0xf138
 *   RSTV0910_REG_0057 = 0xf139
 *   RSTV0910_REG_0058 = 0xf13a
 *   RSTV0910_REG_0059 = 0xf13b
 *   RSTV0910_REG_0060 = 0xf13c
 *   RSTV0910_REG_0061 = 0xf13d
 *   RSTV0910_REG_0062 = 0xf13e
 *   RSTV0910_REG_0063 = 0xf13f
 *   RSTV0910_REG_0064 = 0xf140
 *   RSTV0910_REG_0065 = 0xf141
 *   RSTV0910_REG_0066 = 0xf142
 *   RSTV0910_REG_0067 = 0xf143
 *   RSTV0910_REG_0068 = 0xf144
 *   RSTV0910_REG_0069 = 0xf145
 *   RSTV0910_REG_0070 = 0xf146
 *   RSTV0910_REG_0071 = 0xf147
 *   RSTV0910_REG_0072 = 0xf148
 *   RSTV0910_REG_0073 = 0xf149
 *   RSTV0910_REG_0074 = 0xf14a
 *   RSTV0910_REG_0075 = 0xf14b
 *   RSTV0910_REG_0076 = 0xf14c
 *   RSTV0910_REG_0077 = 0xf14d
 *   RSTV0910_REG_0078 = 0xf14e
 *   RSTV0910_REG_0079 = 0xf14f
 *   RSTV0910_REG_0080 = 0xf150
 *   RSTV0910_REG_0081 = 0xf151
 *   RSTV0910_REG_0082 = 0xf152
 *   RSTV0910_REG_0083 = 0xf153
 *   RSTV0910_REG_0084 = 0xf154
 *   RSTV0910_REG_0085 = 0xf155
 *   RSTV0910_REG_0086 = 0xf156
 *   RSTV0910_REG_0087 = 0xf157
 *   RSTV0910_REG_0088 = 0xf158
 *   RSTV0910_REG_0089 = 0xf159
 *   RSTV0910_REG_0090 = 0xf15a
 *   RSTV0910_REG_0091 = 0xf15b
 *   RSTV0910_REG_0092 = 0xf15c
 *   RSTV0910_REG_0093 = 0xf15d
 *   RSTV0910_REG_0094 = 0xf15e
 *   RSTV0910_REG_0095 = 0xf15f
 *   RSTV0910_REG_0096 = 0xf160
 *   RSTV0910_REG_0097 = 0xf161
 *   RSTV0910_REG_0098 = 0xf162
 *   RSTV0910_REG_0099 = 0xf163
 *   RSTV0910_REG_0100 = 0xf164
 *   RSTV0910_REG_0101 = 0xf165
 *   RSTV0910_REG_0102 = 0xf166
 *   RSTV0910_REG_0103 = 0xf167
 *   RSTV0910_REG_0104 = 0xf168
 *   RSTV0910_REG_0105 = 0xf169
 *   RSTV0910_REG_0106 = 0xf16a
 *   RSTV0910_REG_0107 = 0xf16b
 *   RSTV0910_REG_0108 = 0xf16c
 *   RSTV0910_REG_0109 = 0xf16d
 *   RSTV0910_REG_0110 = 0xf16e
 *   RSTV0910_REG_0111 = 0xf16f
 *   RSTV0910_REG_0112 = 0xf170
 *   RSTV0910_REG_0113 = 0xf171
 *   RSTV0910_REG_0114 = 0xf172
 *   RSTV0910_REG_0115 = 0xf173
 *   RSTV0910_REG_0116 = 0xf174
 *   RSTV0910_REG_0117 = 0xf175
 *   RSTV0910_REG_0118 = 0xf176
 *   RSTV0910_REG_0119 = 0xf177
 *   RSTV0910_REG_0120 = 0xf178
 *   RSTV0910_REG_0121 = 0xf179
 *   RSTV0910_REG_0122 = 0xf17a
 *   RSTV0910_REG_0123 = 0xf17b
 *   RSTV0910_REG_0124 = 0xf17c
 *   RSTV0910_REG_0125 = 0xf17d
 *   RSTV0910_REG_0126 = 0xf17e
 *   RSTV0910_REG_0127 = 0xf17f
 *   RSTV0910_REG_0128 = 0xf180
 *   RSTV0910_REG_0129 = 0xf181
 *   RSTV0910_REG_0130 = 0xf182
 *   RSTV0910_REG_0131 = 0xf183
 *   RSTV0910_REG_0132 = 0xf184
 *   RSTV0910_REG_0133 = 0xf185
 *   RSTV0910_REG_0134 = 0xf186
 *   RSTV0910_REG_0135 = 0xf187
 *   RSTV0910_REG_0136 = 0xf188
 *   RSTV0910_REG_0137 = 0xf189
 *   RSTV0910_REG_0138 = 0xf18a
 *   RSTV0910_REG_0139 = 0xf18b
 *   RSTV0910_REG_0140 = 0xf18c
 *   RSTV0910_REG_0141 = 0xf18d
 *   RSTV0910_REG_0142 = 0xf18e
 *   RSTV0910_REG_0143 = 0xf18f
 *   RSTV0910_REG_0144 = 0xf190
 *   RSTV0910_REG_0145 = 0xf191
 *   RSTV0910_REG_0146 = 0xf192
 *   RSTV0910_REG_0147 = 0xf193
 *   RSTV0910_REG_0148 = 0xf194
 *   RSTV0910_REG_0149 = 0xf195
 *   RSTV0910_REG_0150 = 0xf196
 *   RSTV0910_REG_0151 = 0xf197
 *   RSTV0910_REG_0152 = 0xf198
 *   RSTV0910_REG_0153 = 0xf199
 *   RSTV0910_REG_0154 = 0xf19a
 *   RSTV0910_REG_0155 = 0xf19b
 *   RSTV0910_REG_0156 = 0xf19c
 *   RSTV0910_REG_0157 = 0xf19d
 *   RSTV0910_REG_0158 = 0xf19e
 *   RSTV0910_REG_0159 = 0xf19f
 *   RSTV0910_REG_0160 = 0xf1a0
 *   RSTV0910_REG_0161 = 0xf1a1
 *   RSTV0910_REG_0162 = 0xf1a2
 *   RSTV0910_REG_0163 = 0xf1a3
 *   RSTV0910_REG_0164 = 0xf1a4
 *   RSTV0910_REG_0165 = 0xf1a5
 *   RSTV0910_REG_0166 = 0xf1a6
 *   RSTV0910_REG_0167 = 0xf1a7
 *   RSTV0910_REG_0168 = 0xf1a8
 *   RSTV0910_REG_0169 = 0xf1a9
 *   RSTV0910_REG_0170 = 0xf1aa
 *   RSTV0910_REG_0171 = 0xf1ab
 *   RSTV0910_REG_0172 = 0xf1ac
 *   RSTV0910_REG_0173 = 0xf1ad
 *   RSTV0910_REG_0174 = 0xf1ae
 *   RSTV0910_REG_0175 = 0xf1af
 *   RSTV0910_REG_0176 = 0xf1b0
 *   RSTV0910_REG_0177 = 0xf1b1
 *   RSTV0910_REG_0178 = 0xf1b2
 *   RSTV0910_REG_0179 = 0xf1b3
 *   RSTV0910_REG_0180 = 0xf1b4
 *   RSTV0910_REG_0181 = 0xf1b5
 *   RSTV0910_REG_0182 = 0xf1b6
 *   RSTV0910_REG_0183 = 0xf1b7
 *   RSTV0910_REG_0184 = 0xf1b8
 *   RSTV0910_REG_0185 = 0xf1b9
 *   RSTV0910_REG_0186 = 0xf1ba
 *   RSTV0910_REG_0187 = 0xf1bb
 *   RSTV0910_REG_0188 = 0xf1bc
 *   RSTV0910_REG_0189 = 0xf1bd
 *   RSTV0910_REG_0190 = 0xf1be
 *   RSTV0910_REG_0191 = 0xf1bf
 *   RSTV0910_REG_0192 = 0xf1c0
 *   RSTV0910_REG_0193 = 0xf1c1
 *   RSTV0910_REG_0194 = 0xf1c2
 *   RSTV0910_REG_0195 = 0xf1c3
 *   RSTV0910_REG_0196 = 0xf1c4
 *   RSTV0910_REG_0197 = 0xf1c5
 *   RSTV0910_REG_0198 = 0xf1c6
 *   RSTV0910_REG_0199 = 0xf1c7
 *   RSTV0910_REG_0200 = 0xf1c8
 *   RSTV0910_REG_0201 = 0xf1c9
 *   RSTV0910_REG_0202 = 0xf1ca
 *   RSTV0910_REG_0203 = 0xf1cb
 *   RSTV0910_REG_0204 = 0xf1cc
 *   RSTV0910_REG_0205 = 0xf1cd
 *   RSTV0910_REG_0206 = 0xf1ce
 *   RSTV0910_REG_0207 = 0xf1cf
 *   RSTV0910_REG_0208 = 0xf1d0
 *   RSTV0910_REG_0209 = 0xf1d1
 *   RSTV0910_REG_0210 = 0xf1d2
 *   RSTV0910_REG_0211 = 0xf1d3
 *   RSTV0910_REG_0212 = 0xf1d4
 *   RSTV0910_REG_0213 = 0xf1d5
 *   RSTV0910_REG_0214 = 0xf1d6
 *   RSTV0910_REG_0215 = 0xf1d7
 *   RSTV0910_REG_0216 = 0xf1d8
 *   RSTV0910_REG_0217 = 0xf1d9
 *   RSTV0910_REG_0218 = 0xf1da
 *   RSTV0910_REG_0219 = 0xf1db
 *   RSTV0910_REG_0220 = 0xf1dc
 *   RSTV0910_REG_0221 = 0xf1dd
 *   RSTV0910_REG_0222 = 0xf1de
 *   RSTV0910_REG_0223 = 0xf1df
 *   RSTV0910_REG_0224 = 0xf1e0
 *   RSTV0910_REG_0225 = 0xf1e1
 *   RSTV0910_REG_0226 = 0xf1e2
 *   RSTV0910_REG_0227 = 0xf1e3
 *   RSTV0910_REG_0228 = 0xf1e4
 *   RSTV0910_REG_0229 = 0xf1e5
 *   RSTV0910_REG_0230 = 0xf1e6
 *   RSTV0910_REG_0231 = 0xf1e7
 *   RSTV0910_REG_0232 = 0xf1e8
 *   RSTV0910_REG_0233 = 0xf1e9
 *   RSTV0910_REG_0234 = 0xf1ea
 *   RSTV0910_REG_0235 = 0xf1eb
 *   RSTV0910_REG_0236 = 0xf1ec
 *   RSTV0910_REG_0237 = 0xf1ed
 *   RSTV0910_REG_0238 = 0xf1ee
 *   RSTV0910_REG_0239 = 0xf1ef
 *   RSTV0910_REG_0240 = 0xf1f0
 *   RSTV0910_REG_0241 = 0xf1f1
 *   RSTV0910_REG_0242 = 0xf1f2
 *   RSTV0910_REG_0243 = 0xf1f3
 *   RSTV0910_REG_0244 = 0xf1f4
 *   RSTV0910_REG_0245 = 0xf1f5
 *   RSTV0910_REG_0246 = 0xf1f6
 *   RSTV0910_REG_0247 = 0xf1f7
 *   RSTV0910_REG_0248 = 0xf1f8
 *   RSTV0910_REG_0249 = 0xf1f9
 *   RSTV0910_REG_0250 = 0xf1fa
 *   RSTV0910_REG_0251 = 0xf1fb
 *   RSTV0910_REG_0252 = 0xf1fc
 *   RSTV0910_REG_0253 = 0xf1fd
 *   RSTV0910_REG_0254 = 0xf1fe
 *   RSTV0910_REG_0255 = 0xf1ff
 *   RSTV0910_REG_0256 = 0xf200
 *   RSTV0910_REG_0257 = 0xf201
 *   RSTV0910_REG_0258 = 0xf202
 *   RSTV0910_REG_0259 = 0xf203
 *   RSTV0910_REG_0260 = 0xf204
 *   RSTV0910_REG_0261 = 0xf205
 *   RSTV0910_REG_0262 = 0xf206
 *   RSTV0910_REG_0263 = 0xf207
 *   RSTV0910_REG_0264 = 0xf208
 *   RSTV0910_REG_0265 = 0xf209
 *   RSTV0910_REG_0266 = 0xf20a
 *   RSTV0910_REG_0267 = 0xf20b
 *   RSTV0910_REG_0268 = 0xf20c
 *   RSTV0910_REG_0269 = 0xf20d
 *   RSTV0910_REG_0270 = 0xf20e
 *   RSTV0910_REG_0271 = 0xf20f
 *   RSTV0910_REG_0272 = 0xf210
 *   RSTV0910_REG_0273 = 0xf211
 *   RSTV0910_REG_0274 = 0xf212
 *   RSTV0910_REG_0275 = 0xf213
 *   RSTV0910_REG_0276 = 0xf214
 *   RSTV0910_REG_0277 = 0xf215
 *   RSTV0910_REG_0278 = 0xf216
 *   RSTV0910_REG_0279 = 0xf217
 *   RSTV0910_REG_0280 = 0xf218
 *   RSTV0910_REG_0281 = 0xf219
 *   RSTV0910_REG_0282 = 0xf21a
 *   RSTV0910_REG_0283 = 0xf21b
 *   RSTV0910_REG_0284 = 0xf21c
 *   RSTV0910_REG_0285 = 0xf21d
 *   RSTV0910_REG_0286 = 0xf21e
 *   RSTV0910_REG_0287 = 0xf21f
 *   RSTV0910_REG_0288 = 0xf220
 *   RSTV0910_REG_0289 = 0xf221
 *   RSTV0910_REG_0290 = 0xf222
 *   RSTV0910_REG_0291 = 0xf223
 *   RSTV0910_REG_0292 = 0xf224
 *   RSTV0910_REG_0293 = 0xf225
 *   RSTV0910_REG_0294 = 0xf226
 *   RSTV0910_REG_0295 = 0xf227
 *   RSTV0910_REG_0296 = 0xf228
 *   RSTV0910_REG_0297 = 0xf229
 *   RSTV0910_REG_0298 = 0xf22a
 *   RSTV0910_REG_0299 = 0xf22b
 *   RSTV0910_REG_0300 = 0xf22c
 *   RSTV0910_REG_0301 = 0xf22d
 *   RSTV0910_REG_0302 = 0xf22e
 *   RSTV0910_REG_0303 = 0xf22f
 *   RSTV0910_REG_0304 = 0xf230
 *   RSTV0910_REG_0305 = 0xf231
 *   RSTV0910_REG_0306 = 0xf232
 *   RSTV0910_REG_0307 = 0xf233
 *   RSTV0910_REG_0308 = 0xf234
 *   RSTV0910_REG_0309 = 0xf235
 *   RSTV0910_REG_0310 = 0xf236
 *   RSTV0910_REG_0311 = 0xf237
 *   RSTV0910_REG_0312 = 0xf238
 *   RSTV0910_REG_0313 = 0xf239
 *   RSTV0910_REG_0314 = 0xf23a
 *   RSTV0910_REG_0315 = 0xf23b
 *   RSTV0910_REG_0316 = 0xf23c
 *   RSTV0910_REG_0317 = 0xf23d
 *   RSTV0910_REG_0318 = 0xf23e
 *   RSTV0910_REG_0319 = 0xf23f
 *   RSTV0910_REG_0320 = 0xf240
 *   RSTV0910_REG_0321 = 0xf241
 *   RSTV0910_REG_0322 = 0xf242
 *   RSTV0910_REG_0323 = 0xf243
 *   RSTV0910_REG_0324 = 0xf244
 *   RSTV0910_REG_0325 = 0xf245
 *   RSTV0910_REG_0326 = 0xf246
 *   RSTV0910_REG_0327 = 0xf247
 *   RSTV0910_REG_0328 = 0xf248
 *   RSTV0910_REG_0329 = 0xf249
 *   RSTV0910_REG_0330 = 0xf24a
 *   RSTV0910_REG_0331 = 0xf24b
 *   RSTV0910_REG_0332 = 0xf24c
 *   RSTV0910_REG_0333 = 0xf24d
 *   RSTV0910_REG_0334 = 0xf24e
 *   RSTV0910_REG_0335 = 0xf24f
 *   RSTV0910_REG_0336 = 0xf250
 *   RSTV0910_REG_0337 = 0xf251
 *   RSTV0910_REG_0338 = 0xf252
 *   RSTV0910_REG_0339 = 0xf253
 *   RSTV0910_REG_0340 = 0xf254
 *   RSTV0910_REG_0341 = 0xf255
 *   RSTV0910_REG_0342 = 0xf256
 *   RSTV0910_REG_0343 = 0xf257
 *   RSTV0910_REG_0344 = 0xf258
 *   RSTV0910_REG_0345 = 0xf259
 *   RSTV0910_REG_0346 = 0xf25a
 *   RSTV0910_REG_0347 = 0xf25b
 *   RSTV0910_REG_0348 = 0xf25c
 *   RSTV0910_REG_0349 = 0xf25d
 *   RSTV0910_REG_0350 = 0xf25e
 *   RSTV0910_REG_0351 = 0xf25f
 *   RSTV0910_REG_0352 = 0xf260
 *   RSTV0910_REG_0353 = 0xf261
 *   RSTV0910_REG_0354 = 0xf262
 *   RSTV0910_REG_0355 = 0xf263
 *   RSTV0910_REG_0356 = 0xf264
 *   RSTV0910_REG_0357 = 0xf265
 *   RSTV0910_REG_0358 = 0xf266
 *   RSTV0910_REG_0359 = 0xf267
 *   RSTV0910_REG_0360 = 0xf268
 *   RSTV0910_REG_0361 = 0xf269
 *   RSTV0910_REG_0362 = 0xf26a
 *   RSTV0910_REG_0363 = 0xf26b
 *   RSTV0910_REG_0364 = 0xf26c
 *   RSTV0910_REG_0365 = 0xf26d
 *   RSTV0910_REG_0366 = 0xf26e
 *   RSTV0910_REG_0367 = 0xf26f
 *   RSTV0910_REG_0368 = 0xf270
 *   RSTV0910_REG_0369 = 0xf271
 *   RSTV0910_REG_0370 = 0xf272
 *   RSTV0910_REG_0371 = 0xf273
 *   RSTV0910_REG_0372 = 0xf274
 *   RSTV0910_REG_0373 = 0xf275
 *   RSTV0910_REG_0374 = 0xf276
 *   RSTV0910_REG_0375 = 0xf277
 *   RSTV0910_REG_0376 = 0xf278
 *   RSTV0910_REG_0377 = 0xf279
 *   RSTV0910_REG_0378 = 0xf27a
 *   RSTV0910_REG_0379 = 0xf27b
 *   RSTV0910_REG_0380 = 0xf27c
 *   RSTV0910_REG_0381 = 0xf27d
 *   RSTV0910_REG_0382 = 0xf27e
 *   RSTV0910_REG_0383 = 0xf27f
 *   RSTV0910_REG_0384 = 0xf280
 *   RSTV0910_REG_0385 = 0xf281
 *   RSTV0910_REG_0386 = 0xf282
 *   RSTV0910_REG_0387 = 0xf283
 *   RSTV0910_REG_0388 = 0xf284
 *   RSTV0910_REG_0389 = 0xf285
 *   RSTV0910_REG_0390 = 0xf286
 *   RSTV0910_REG_0391 = 0xf287
 *   RSTV0910_REG_0392 = 0xf288
 *   RSTV0910_REG_0393 = 0xf289
 *   RSTV0910_REG_0394 = 0xf28a
 *   RSTV0910_REG_0395 = 0xf28b
 *   RSTV0910_REG_0396 = 0xf28c
 *   RSTV0910_REG_0397 = 0xf28d
 *   RSTV0910_REG_0398 = 0xf28e
 *   RSTV0910_REG_0399 = 0xf28f
 *   RSTV0910_REG_0400 = 0xf290
 *   RSTV0910_REG_0401 = 0xf291
 *   RSTV0910_REG_0402 = 0xf292
 *   RSTV0910_REG_0403 = 0xf293
 *   RSTV0910_REG_0404 = 0xf294
 *   RSTV0910_REG_0405 = 0xf295
 *   RSTV0910_REG_0406 = 0xf296
 *   RSTV0910_REG_0407 = 0xf297
 *   RSTV0910_REG_0408 = 0xf298
 *   RSTV0910_REG_0409 = 0xf299
 *   RSTV0910_REG_0410 = 0xf29a
 *   RSTV0910_REG_0411 = 0xf29b
 *   RSTV0910_REG_0412 = 0xf29c
 *   RSTV0910_REG_0413 = 0xf29d
 *   RSTV0910_REG_0414 = 0xf29e
 *   RSTV0910_REG_0415 = 0xf29f
 *   RSTV0910_REG_0416 = 0xf2a0
 *   RSTV0910_REG_0417 = 0xf2a1
 *   RSTV0910_REG_0418 = 0xf2a2
 *   RSTV0910_REG_0419 = 0xf2a3
 *   RSTV0910_REG_0420 = 0xf2a4
 *   RSTV0910_REG_0421 = 0xf2a5
 *   RSTV0910_REG_0422 = 0xf2a6
 *   RSTV0910_REG_0423 = 0xf2a7
 *   RSTV0910_REG_0424 = 0xf2a8
 *   RSTV0910_REG_0425 = 0xf2a9
 *   RSTV0910_REG_0426 = 0xf2aa
 *   RSTV0910_REG_0427 = 0xf2ab
 *   RSTV0910_REG_0428 = 0xf2ac
 *   RSTV0910_REG_0429 = 0xf2ad
 *   RSTV0910_REG_0430 = 0xf2ae
 *   RSTV0910_REG_0431 = 0xf2af
 *   RSTV0910_REG_0432 = 0xf2b0
 *   RSTV0910_REG_0433 = 0xf2b1
 *   RSTV0910_REG_0434 = 0xf2b2
 *   RSTV0910_REG_0435 = 0xf2b3
 *   RSTV0910_REG_0436 = 0xf2b4
 *   RSTV0910_REG_0437 = 0xf2b5
 *   RSTV0910_REG_0438 = 0xf2b6
 *   RSTV0910_REG_0439 = 0xf2b7
 *   RSTV0910_REG_0440 = 0xf2b8
 *   RSTV0910_REG_0441 = 0xf2b9
 *   RSTV0910_REG_0442 = 0xf2ba
 *   RSTV0910_REG_0443 = 0xf2bb
 *   RSTV0910_REG_0444 = 0xf2bc
 *   RSTV0910_REG_0445 = 0xf2bd
 *   RSTV0910_REG_0446 = 0xf2be
 *   RSTV0910_REG_0447 = 0xf2bf
 *   RSTV0910_REG_0448 = 0xf2c0
 *   RSTV0910_REG_0449 = 0xf2c1
 *   RSTV0910_REG_0450 = 0xf2c2
 *   RSTV0910_REG_0451 = 0xf2c3
 *   RSTV0910_REG_0452 = 0xf2c4
 *   RSTV0910_REG_0453 = 0xf2c5
 *   RSTV0910_REG_0454 = 0xf2c6
 *   RSTV0910_REG_0455 = 0xf2c7
 *   RSTV0910_REG_0456 = 0xf2c8
 *   RSTV0910_REG_0457 = 0xf2c9
 *   RSTV0910_REG_0458 = 0xf2ca
 *   RSTV0910_REG_0459 = 0xf2cb
 *   RSTV0910_REG_0460 = 0xf2cc
 */

static int get_signal_parameters(struct stv *state)
{
	u8 tmp;

	if (!state->started)
		return -EINVAL;

	if (state->receive_mode == RCVMODE_DVBS2) {
		read_reg(state, RSTV0910_P2_DMDMODCOD + state->regoff, &tmp);
		state->modcod = (tmp & 0x7c) >> 2;
		state->pilots = (tmp & 0x01) != 0;
		read_reg(state, RSTV0910_P2_VSTATUSVIT + state->regoff, &tmp);
		if (tmp & 0x20) {
			state->fec_locked = 1;
			state->punct_rate = (tmp >> 1) & 0x0f;
		}
	} else if (state->receive_mode == RCVMODE_DVBS) {
		read_reg(state, RSTV0910_P2_VITCURPUN + state->regoff, &tmp);
		state->punct_rate = tmp & 0x1f;
	}

	return 0;
}
